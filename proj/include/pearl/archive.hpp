#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pearl/density.hpp"
#include "pearl/pareto.hpp"
#include "pearl/types.hpp"

namespace pearl {

enum class DominanceKind { plain, constrained };

// Bounded buffer of mutually non-dominated solutions. Each rollout worker owns
// its archive exclusively.
class ParetoArchive {
public:
  explicit ParetoArchive(std::size_t capacity = unbounded, DominanceKind kind = DominanceKind::plain)
      : capacity_(capacity), kind_(kind) {
    if (capacity == 0) throw UsageError("ParetoArchive: capacity must be positive");
  }

  std::size_t capacity() const noexcept { return capacity_; }
  DominanceKind dominance() const noexcept { return kind_; }
  const std::vector<Solution>& members() const noexcept { return members_; }
  std::vector<Solution>& members() noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  bool dominates(const Solution& a, const Solution& b) const {
    return kind_ == DominanceKind::plain ? pearl::dominates(a.obj, b.obj) : constrained_dominates(a, b);
  }

  // Exact clones are rejected so the buffer cannot flood with copies.
  static bool same_point(const Solution& a, const Solution& b) { return a.obj == b.obj && a.cv == b.cv; }

  bool rejects(const Solution& s) const {
    for (const auto& m : members_)
      if (dominates(m, s) || same_point(m, s)) return true;
    return false;
  }

  std::vector<ObjectiveVector> objectives() const {
    std::vector<ObjectiveVector> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.obj);
    return out;
  }

private:
  std::size_t capacity_;
  DominanceKind kind_;
  std::vector<Solution> members_;
};

// Outcome of an insertion: nullopt rank means the candidate was dominated.
struct InsertOutcome {
  std::optional<std::size_t> rank;
  bool dominated() const noexcept { return !rank.has_value(); }
};

enum class DensityKind { crowding, niching };

// Density ranker over archive members. Niching needs reference directions.
struct DensityRanker {
  DensityKind kind = DensityKind::crowding;
  ReferenceDirectionSet dirs;

  static DensityRanker crowding() { return {}; }
  static DensityRanker niching(ReferenceDirectionSet d) { return {DensityKind::niching, std::move(d)}; }

  std::vector<std::size_t> operator()(const std::vector<Solution>& members) const {
    std::vector<ObjectiveVector> objs;
    objs.reserve(members.size());
    for (const auto& m : members) objs.push_back(m.obj);
    return kind == DensityKind::crowding ? crowding_rank(objs).order : niching_rank(objs, dirs).order;
  }
};

// Inserts `s`: dominated candidates are rejected; otherwise members that `s`
// dominates are dropped, everything is re-ranked by `ranker` (a callable
// returning a best-first order over members), the candidate's position is
// reported and the archive is cut to its best `capacity` members.
template <class Ranker>
InsertOutcome archive_insert(ParetoArchive& archive, const Solution& s, const Ranker& ranker) {
  if (archive.rejects(s)) return {};
  auto& members = archive.members();
  std::erase_if(members, [&](const Solution& m) { return archive.dominates(s, m); });
  members.push_back(s);
  const std::size_t self = members.size() - 1;

  const std::vector<std::size_t> order = ranker(std::as_const(members));
  std::size_t pos = 0;
  while (order[pos] != self) ++pos;

  if (members.size() > archive.capacity()) {
    std::vector<Solution> kept;
    kept.reserve(archive.capacity());
    for (std::size_t r = 0; r < archive.capacity(); ++r) kept.push_back(std::move(members[order[r]]));
    members = std::move(kept);
  }
  return {pos};
}

// Insertion without ranking, for unbounded archives that only collect the
// front. Returns false if the candidate was rejected.
inline bool archive_add(ParetoArchive& archive, const Solution& s) {
  if (archive.rejects(s)) return false;
  auto& members = archive.members();
  std::erase_if(members, [&](const Solution& m) { return archive.dominates(s, m); });
  members.push_back(s);
  return true;
}

}  // namespace pearl
