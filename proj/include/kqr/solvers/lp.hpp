#pragma once

#include "kqr/types.hpp"

namespace kqr {

inline constexpr double kLpDefaultTol = 1e-8;

// Two-phase primal simplex on a dense tableau. General bounds are folded into
// standard form (shift / flip / split plus range rows). Pricing is
// most-negative reduced cost with lowest-index tie-breaking; after a stretch of
// degenerate pivots the rule drops to pure lowest-index (Bland) so termination
// is guaranteed. Entirely deterministic. max_iter = 0 means 50 * (column count).
SolverSolution solve_lp(const LpProblem& p, double tol = kLpDefaultTol, long max_iter = 0);

}  // namespace kqr
