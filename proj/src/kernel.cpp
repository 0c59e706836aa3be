#include "kqr/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace kqr {

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "linear") return KernelFamily::Linear;
  if (name == "rbf") return KernelFamily::RBF;
  throw std::invalid_argument("unknown kernel family \"" + name +
                              "\" (expected \"linear\" or \"rbf\")");
}

const char* to_string(KernelFamily family) {
  return family == KernelFamily::Linear ? "linear" : "rbf";
}

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::Infeasible: return "infeasible";
    case SolverStatus::Unbounded: return "unbounded";
    case SolverStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const VectorXd>& a,
                   const Eigen::Ref<const VectorXd>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (spec.family == KernelFamily::Linear) return a.dot(b);
  if (!(spec.width > 0.0)) throw std::invalid_argument("kernel_eval: rbf width must be > 0");
  return std::exp(-spec.width * (a - b).squaredNorm());
}

MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const MatrixXd>& rows,
                     const Eigen::Ref<const MatrixXd>& cols) {
  if (rows.cols() != cols.cols()) throw std::invalid_argument("gram_matrix: dimension mismatch");
  if (spec.family == KernelFamily::RBF && !(spec.width > 0.0))
    throw std::invalid_argument("gram_matrix: rbf width must be > 0");
  MatrixXd g(rows.rows(), cols.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < cols.rows(); ++j)
      g(i, j) = spec.family == KernelFamily::Linear
                    ? rows.row(i).dot(cols.row(j))
                    : std::exp(-spec.width * (rows.row(i) - cols.row(j)).squaredNorm());
  return g;
}

MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const MatrixXd>& points) {
  if (spec.family == KernelFamily::RBF && !(spec.width > 0.0))
    throw std::invalid_argument("gram_matrix: rbf width must be > 0");
  const Eigen::Index m = points.rows();
  MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = spec.family == KernelFamily::Linear
                           ? points.row(i).dot(points.row(j))
                           : std::exp(-spec.width * (points.row(i) - points.row(j)).squaredNorm());
      g(i, j) = v;
      g(j, i) = v;  // exact symmetry by construction
    }
  }
  return g;
}

}  // namespace kqr
