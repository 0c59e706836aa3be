#pragma once

#include "kqr/types.hpp"

namespace kqr {

// Dense solve via LU with partial pivoting. Returns x with
// ||m x - rhs||_inf <= tol * (1 + ||rhs||_inf); throws std::runtime_error with a
// condition diagnostic when the matrix is numerically singular.
VectorXd solve_linear_system(const Eigen::Ref<const MatrixXd>& m,
                             const Eigen::Ref<const VectorXd>& rhs, double tol = 1e-8);

}  // namespace kqr
