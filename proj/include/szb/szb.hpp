#pragma once

// Umbrella header.

#include "szb/errors.hpp"
#include "szb/policy.hpp"
#include "szb/numeric.hpp"
#include "szb/dunkl_core.hpp"
#include "szb/test_function.hpp"
#include "szb/special.hpp"
#include "szb/operators.hpp"
#include "szb/moments_bounds.hpp"
#include "szb/analysis.hpp"
#include "szb/table_io.hpp"
#include "szb/experiment.hpp"
#include "szb/acceptance.hpp"
