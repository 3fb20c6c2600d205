#pragma once

// Block monotone Jacobi / Gauss-Seidel solvers for coupled two-component
// convection-diffusion-reaction problems on the unit square.

#include "monoblock/errors.hpp"
#include "monoblock/mesh.hpp"
#include "monoblock/problem.hpp"
#include "monoblock/tridiagonal.hpp"
#include "monoblock/discretization.hpp"
#include "monoblock/linear_solver.hpp"
#include "monoblock/monotone.hpp"
#include "monoblock/init.hpp"
