#include "kqr/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace kqr {

double pinball(double q, double u) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("pinball: q must lie in (0,1)");
  return u >= 0.0 ? q * u : (q - 1.0) * u;
}

double tube_loss(const TubeParams& params, double u_upper, double u_lower) {
  if (!(params.coverage_target > 0.0 && params.coverage_target < 1.0))
    throw std::invalid_argument("tube_loss: coverage_target must lie in (0,1)");
  if (!(params.r > 0.0 && params.r < 1.0))
    throw std::invalid_argument("tube_loss: r must lie in (0,1)");
  if (u_upper > u_lower) throw std::invalid_argument("tube_loss: malformed pair, u_upper > u_lower");
  const double alpha = 1.0 - params.coverage_target;
  if (u_upper > 0.0) return (1.0 - alpha) * u_upper;
  if (u_lower < 0.0) return -(1.0 - alpha) * u_lower;
  // in-tube: u_upper <= 0 <= u_lower
  if (params.r * u_upper + (1.0 - params.r) * u_lower >= 0.0) return -alpha * u_upper;
  return alpha * u_lower;
}

double cwc(double mpiw, double picp, double y_range, double eta, double coverage_target) {
  if (!(y_range > 0.0)) throw std::invalid_argument("cwc: y_range must be > 0");
  const double gamma = picp >= coverage_target ? 0.0 : 1.0;
  return (mpiw / y_range) * (1.0 + gamma * std::exp(-eta * (picp - coverage_target)));
}

}  // namespace kqr
