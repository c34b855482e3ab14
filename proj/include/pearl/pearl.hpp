#pragma once

#include "pearl/types.hpp"
#include "pearl/pareto.hpp"
#include "pearl/density.hpp"
#include "pearl/archive.hpp"
#include "pearl/rewards.hpp"
#include "pearl/reward_engine.hpp"
#include "pearl/problems.hpp"
#include "pearl/policy.hpp"
#include "pearl/trainer.hpp"
#include "pearl/nsga.hpp"
#include "pearl/indicators.hpp"
#include "pearl/stats.hpp"
#include "pearl/experiment.hpp"
