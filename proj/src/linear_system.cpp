#include "kqr/solvers/linear_system.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kqr {

VectorXd solve_linear_system(const Eigen::Ref<const MatrixXd>& m,
                             const Eigen::Ref<const VectorXd>& rhs, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("solve_linear_system: matrix not square");
  if (m.rows() != rhs.size())
    throw std::invalid_argument("solve_linear_system: rhs size mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_linear_system: tol must be > 0");

  Eigen::PartialPivLU<MatrixXd> lu(m);
  const VectorXd x = lu.solve(rhs);
  const double residual = (m * x - rhs).cwiseAbs().maxCoeff();
  const double budget = tol * (1.0 + rhs.cwiseAbs().maxCoeff());
  if (!x.allFinite() || residual > budget) {
    const double rcond = lu.rcond();
    std::ostringstream msg;
    msg << "solve_linear_system: numerically singular matrix (residual " << residual
        << " > " << budget << ", rcond estimate " << rcond << ")";
    throw std::runtime_error(msg.str());
  }
  return x;
}

}  // namespace kqr
