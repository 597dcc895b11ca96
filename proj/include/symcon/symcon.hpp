#pragma once

#include "symcon/constants_opt.hpp"
#include "symcon/csv.hpp"
#include "symcon/damage.hpp"
#include "symcon/datagen.hpp"
#include "symcon/energy.hpp"
#include "symcon/evaluate.hpp"
#include "symcon/evaluators.hpp"
#include "symcon/infix.hpp"
#include "symcon/kinematics.hpp"
#include "symcon/loading.hpp"
#include "symcon/materials.hpp"
#include "symcon/nelder_mead.hpp"
#include "symcon/pipeline.hpp"
#include "symcon/policy.hpp"
#include "symcon/program.hpp"
#include "symcon/report.hpp"
#include "symcon/reward.hpp"
#include "symcon/sampler.hpp"
#include "symcon/search.hpp"
#include "symcon/simplify.hpp"
#include "symcon/stress.hpp"
#include "symcon/token.hpp"
