#pragma once

// Umbrella header: fractional nabla calculus on time scales, the impulsive
// problem solver, solvability condition checks, and the config/CSV plumbing.

#include "tsfrac/conditions.hpp"
#include "tsfrac/config.hpp"
#include "tsfrac/csv.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/expr.hpp"
#include "tsfrac/frac_ops.hpp"
#include "tsfrac/gammafn.hpp"
#include "tsfrac/nabla.hpp"
#include "tsfrac/solver.hpp"
#include "tsfrac/timescale.hpp"
