#pragma once

// Umbrella header: the numerical library without the command-line layer.

#include "hilfer/errors.hpp"
#include "hilfer/existence.hpp"
#include "hilfer/expr.hpp"
#include "hilfer/fraccalc.hpp"
#include "hilfer/mesh.hpp"
#include "hilfer/problem_io.hpp"
#include "hilfer/quadrature.hpp"
#include "hilfer/solver.hpp"
#include "hilfer/specfun.hpp"
