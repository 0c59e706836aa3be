#pragma once

#include "kqr/types.hpp"

namespace kqr {

inline constexpr double kQpDefaultTol = 1e-6;

// Convex QP over a box with at most one linear equality:
//   min .5 x'Gx + c'x   s.t.  eq'x = rhs (optional),  lower <= x <= upper.
// Pairwise coordinate descent on the equality-coupled variables plus exact
// single-coordinate steps on the uncoupled ones; deterministic maximal-violation
// selection with lowest-index tie-breaking. max_iter = 0 means 10 * n^2.
// Optimal status guarantees the certificate residuals are within tol.
SolverSolution solve_qp_box_eq(const QpBoxEqProblem& p, double tol = kQpDefaultTol,
                               long max_iter = 0);

}  // namespace kqr
