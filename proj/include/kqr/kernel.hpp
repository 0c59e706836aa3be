#pragma once

#include "kqr/types.hpp"

#include <string>

namespace kqr {

KernelFamily kernel_family_from_string(const std::string& name);  // "linear" | "rbf"
const char* to_string(KernelFamily family);

// k(a,b): linear = a.b, rbf = exp(-width * |a-b|^2). width > 0 required for rbf.
double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const VectorXd>& a,
                   const Eigen::Ref<const VectorXd>& b);

// Cross-Gram K[i,j] = k(rows.row(i), cols.row(j)). rows and cols must agree in column count.
MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const MatrixXd>& rows,
                     const Eigen::Ref<const MatrixXd>& cols);

// Symmetric Gram over one point set.
MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const MatrixXd>& points);

}  // namespace kqr
