#include "kqr/datagen.hpp"

#include "kqr/rng.hpp"
#include "kqr/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace kqr {

namespace {

double normal_sigma(AdId id, NoiseScale scale) {
  double s = 0.0;
  switch (id) {
    case AdId::AD1: s = 0.6; break;
    case AdId::AD3: s = 0.4; break;
    case AdId::AD4: s = 0.8; break;
    default: throw std::logic_error("normal_sigma: not a normal-noise setting");
  }
  return scale == NoiseScale::StdDev ? s : std::sqrt(s);
}

}  // namespace

double ad_mean(double x) { return (1.0 - x + 2.0 * x * x) * std::exp(-0.5 * x * x); }

Dataset generate_ad(AdId id, Eigen::Index m, std::uint64_t seed, NoiseScale scale) {
  if (m < 1) throw std::invalid_argument("generate_ad: m must be >= 1");
  // separate substreams for inputs and noise keep draws stable if one use changes
  Rng xs(SeedStream::root(seed).child(1));
  Rng ns(SeedStream::root(seed).child(2));
  Dataset d;
  d.inputs.resize(m, 1);
  d.targets.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = xs.uniform(-5.0, 5.0);
    double noise = 0.0;
    switch (id) {
      case AdId::AD1:
      case AdId::AD3:
      case AdId::AD4: noise = ns.normal(0.0, normal_sigma(id, scale)); break;
      case AdId::AD2: noise = ns.chi_squared(3); break;
      case AdId::AD5: noise = ns.uniform(-5.0, 5.0); break;
      case AdId::AD6: noise = ns.uniform(-4.0, 4.0); break;
    }
    d.inputs(i, 0) = x;
    d.targets(i) = ad_mean(x) + noise;
  }
  d.column_names = {"x", "y"};
  return d;
}

double true_quantile(AdId id, double q, double x, NoiseScale scale) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("true_quantile: q must lie in (0,1)");
  double nq = 0.0;
  switch (id) {
    case AdId::AD1:
    case AdId::AD3:
    case AdId::AD4: nq = normal_sigma(id, scale) * normal_quantile(q); break;
    case AdId::AD2: nq = chi_squared_quantile(q, 3); break;
    case AdId::AD5: nq = -5.0 + 10.0 * q; break;
    case AdId::AD6: nq = -4.0 + 8.0 * q; break;
  }
  return ad_mean(x) + nq;
}

AdId ad_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (s == "AD1" || s == "1") return AdId::AD1;
  if (s == "AD2" || s == "2") return AdId::AD2;
  if (s == "AD3" || s == "3") return AdId::AD3;
  if (s == "AD4" || s == "4") return AdId::AD4;
  if (s == "AD5" || s == "5") return AdId::AD5;
  if (s == "AD6" || s == "6") return AdId::AD6;
  throw std::invalid_argument("unknown generator id: " + name);
}

const char* to_string(AdId id) {
  switch (id) {
    case AdId::AD1: return "AD1";
    case AdId::AD2: return "AD2";
    case AdId::AD3: return "AD3";
    case AdId::AD4: return "AD4";
    case AdId::AD5: return "AD5";
    case AdId::AD6: return "AD6";
  }
  return "?";
}

}  // namespace kqr
