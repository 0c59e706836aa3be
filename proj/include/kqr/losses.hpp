#pragma once

#include "kqr/types.hpp"

namespace kqr {

// Quantile check loss: q*u for u >= 0, (q-1)*u otherwise.
double pinball(double q, double u);

// Two-sided tube loss. u_upper = y - upper_bound, u_lower = y - lower_bound,
// so u_upper <= u_lower whenever the bounds are ordered. Piecewise linear:
// exits are charged at coverage_target, in-tube points at (1 - coverage_target)
// times the distance to the bound selected by the r-weighted rule.
double tube_loss(const TubeParams& params, double u_upper, double u_lower);

// Coverage-width cost: (mpiw / y_range) * (1 + gamma * exp(-eta * (picp - coverage_target)))
// with gamma = 0 when picp >= coverage_target else 1. Diagnostic metric only.
double cwc(double mpiw, double picp, double y_range, double eta, double coverage_target);

inline constexpr double kDefaultCwcEta = 50.0;

}  // namespace kqr
