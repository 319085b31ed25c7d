#pragma once

// Umbrella header: complex-valued valuation functionals on discretized L^p
// domains, their geometric backends, and the property harness around them.

#include "lpval/complex_value.hpp"
#include "lpval/config.hpp"
#include "lpval/errors.hpp"
#include "lpval/euclidean_grid.hpp"
#include "lpval/generator.hpp"
#include "lpval/harness.hpp"
#include "lpval/partition.hpp"
#include "lpval/rng.hpp"
#include "lpval/simple_function.hpp"
#include "lpval/sphere.hpp"
#include "lpval/summation.hpp"
#include "lpval/valuation.hpp"
