#pragma once

#include "kqr/types.hpp"

namespace kqr {

// Fraction of y_i with lower_i <= y_i <= upper_i (inclusive endpoints).
double picp(const Eigen::Ref<const VectorXd>& lower, const Eigen::Ref<const VectorXd>& upper,
            const Eigen::Ref<const VectorXd>& y);

// Mean interval width.
double mpiw(const Eigen::Ref<const VectorXd>& lower, const Eigen::Ref<const VectorXd>& upper);

// Coverage shortfall: max(0, coverage_target - picp_value).
double pice(double picp_value, double coverage_target);

// Fraction of y_i at or below the corresponding prediction.
double coverage_probability(const Eigen::Ref<const VectorXd>& predictions,
                            const Eigen::Ref<const VectorXd>& y);

double quantile_rmse(const Eigen::Ref<const VectorXd>& estimate,
                     const Eigen::Ref<const VectorXd>& truth);

}  // namespace kqr
