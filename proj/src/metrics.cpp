#include "kqr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace kqr {

namespace {
void require_same(Eigen::Index a, Eigen::Index b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": length mismatch");
}
}  // namespace

double picp(const Eigen::Ref<const VectorXd>& lower, const Eigen::Ref<const VectorXd>& upper,
            const Eigen::Ref<const VectorXd>& y) {
  require_same(lower.size(), upper.size(), "picp");
  require_same(lower.size(), y.size(), "picp");
  if (y.size() == 0) throw std::invalid_argument("picp: empty input");
  Eigen::Index inside = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (lower(i) <= y(i) && y(i) <= upper(i)) ++inside;
  return static_cast<double>(inside) / static_cast<double>(y.size());
}

double mpiw(const Eigen::Ref<const VectorXd>& lower, const Eigen::Ref<const VectorXd>& upper) {
  require_same(lower.size(), upper.size(), "mpiw");
  if (lower.size() == 0) throw std::invalid_argument("mpiw: empty input");
  return (upper - lower).mean();
}

double pice(double picp_value, double coverage_target) {
  return std::max(0.0, coverage_target - picp_value);
}

double coverage_probability(const Eigen::Ref<const VectorXd>& predictions,
                            const Eigen::Ref<const VectorXd>& y) {
  require_same(predictions.size(), y.size(), "coverage_probability");
  if (y.size() == 0) throw std::invalid_argument("coverage_probability: empty input");
  Eigen::Index below = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) <= predictions(i)) ++below;
  return static_cast<double>(below) / static_cast<double>(y.size());
}

double quantile_rmse(const Eigen::Ref<const VectorXd>& estimate,
                     const Eigen::Ref<const VectorXd>& truth) {
  require_same(estimate.size(), truth.size(), "quantile_rmse");
  if (estimate.size() == 0) throw std::invalid_argument("quantile_rmse: empty input");
  return std::sqrt((estimate - truth).squaredNorm() / static_cast<double>(estimate.size()));
}

}  // namespace kqr
