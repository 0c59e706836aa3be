#pragma once

#include "kqr/types.hpp"

#include <cstdint>

namespace kqr {

// Six 1-D synthetic regression settings sharing the mean curve
// (1 - x + 2x^2) * exp(-x^2/2) on x ~ U(-5,5) and differing only in noise:
//   1: N(0, 0.6)   2: chi^2(3)   3: N(0, 0.4)
//   4: N(0, 0.8)   5: U(-5, 5)   6: U(-4, 4)
enum class AdId { AD1 = 1, AD2, AD3, AD4, AD5, AD6 };

// How to read the second parameter of the normal noises above.
enum class NoiseScale { StdDev, Variance };

double ad_mean(double x);

Dataset generate_ad(AdId id, Eigen::Index m, std::uint64_t seed,
                    NoiseScale scale = NoiseScale::StdDev);

// Conditional quantile of y given x at level q (mean + noise inverse CDF).
double true_quantile(AdId id, double q, double x, NoiseScale scale = NoiseScale::StdDev);

AdId ad_from_string(const std::string& name);  // "AD1".."AD6" (case-insensitive)
const char* to_string(AdId id);

}  // namespace kqr
