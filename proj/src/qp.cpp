#include "kqr/solvers/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void validate(const QpBoxEqProblem& p) {
  const Eigen::Index n = p.gram.rows();
  if (p.gram.cols() != n) throw std::invalid_argument("solve_qp_box_eq: gram not square");
  if (p.linear.size() != n || p.lower.size() != n || p.upper.size() != n)
    throw std::invalid_argument("solve_qp_box_eq: vector size mismatch");
  if (p.use_equality && p.eq_vector.size() != n)
    throw std::invalid_argument("solve_qp_box_eq: eq_vector size mismatch");
  if (n > 0) {
    const double scale = std::max(1.0, p.gram.cwiseAbs().maxCoeff());
    if ((p.gram - p.gram.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument("solve_qp_box_eq: gram not symmetric");
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (p.lower(i) > p.upper(i))
      throw std::invalid_argument("solve_qp_box_eq: lower bound exceeds upper bound");
}

}  // namespace

SolverSolution solve_qp_box_eq(const QpBoxEqProblem& p, double tol, long max_iter) {
  validate(p);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_qp_box_eq: tol must be > 0");
  const Eigen::Index n = p.gram.rows();
  SolverSolution sol;
  if (n == 0) {
    sol.status = p.use_equality && std::fabs(p.eq_rhs) > tol ? SolverStatus::Infeasible
                                                             : SolverStatus::Optimal;
    return sol;
  }
  if (max_iter <= 0) max_iter = 10L * static_cast<long>(n) * static_cast<long>(n);

  // Transformed coordinates z_i = s_i x_i with s_i = eq_vector_i on the
  // equality-coupled set and 1 elsewhere, so the equality reads sum(z_S) = rhs.
  VectorXd s = VectorXd::Ones(n);
  std::vector<Eigen::Index> coupled;
  if (p.use_equality)
    for (Eigen::Index i = 0; i < n; ++i)
      if (p.eq_vector(i) != 0.0) {
        s(i) = p.eq_vector(i);
        coupled.push_back(i);
      }
  const VectorXd inv_s = s.cwiseInverse();
  MatrixXd q = inv_s.asDiagonal() * p.gram * inv_s.asDiagonal();
  const VectorXd cz = p.linear.cwiseProduct(inv_s);
  VectorXd loz(n), hiz(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double b1 = s(i) * p.lower(i);
    const double b2 = s(i) * p.upper(i);
    loz(i) = std::min(b1, b2);
    hiz(i) = std::max(b1, b2);
    if (std::isnan(loz(i))) loz(i) = -kInf;  // 0 * inf guards (cannot occur: s != 0)
    if (std::isnan(hiz(i))) hiz(i) = kInf;
  }

  const double feas = tol * (1.0 + std::fabs(p.eq_rhs));
  if (p.use_equality) {
    double sum_lo = 0.0, sum_hi = 0.0;
    for (Eigen::Index i : coupled) {
      sum_lo += loz(i);  // -inf propagates
      sum_hi += hiz(i);
    }
    if (coupled.empty()) {
      if (std::fabs(p.eq_rhs) > feas) {
        sol.status = SolverStatus::Infeasible;
        sol.x = VectorXd::Zero(n);
        return sol;
      }
    } else if (p.eq_rhs < sum_lo - feas || p.eq_rhs > sum_hi + feas) {
      sol.status = SolverStatus::Infeasible;
      sol.x = VectorXd::Zero(n);
      return sol;
    }
  }

  // start at the projection of 0, then sweep the coupled set to meet the equality
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = clamp(0.0, loz(i), hiz(i));
  if (p.use_equality && !coupled.empty()) {
    double deficit = p.eq_rhs;
    for (Eigen::Index i : coupled) deficit -= z(i);
    for (Eigen::Index i : coupled) {
      if (deficit == 0.0) break;
      const double room = deficit > 0.0 ? hiz(i) - z(i) : loz(i) - z(i);
      const double step = deficit > 0.0 ? std::min(deficit, room) : std::max(deficit, room);
      z(i) += step;
      deficit -= step;
    }
  }

  VectorXd g = q * z + cz;  // z-space gradient
  const double tiny = 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff());

  long iter = 0;
  bool unbounded = false;
  auto nu_and_stat = [&](double& nu_out) -> double {
    // multiplier estimate for the equality, then the x-space projected-gradient
    // residual it implies (x residual_i = |s_i| * z residual_i)
    double min_up = kInf, max_dn = -kInf;
    for (Eigen::Index i : coupled) {
      if (loz(i) == hiz(i)) continue;
      if (z(i) < hiz(i)) min_up = std::min(min_up, g(i));
      if (z(i) > loz(i)) max_dn = std::max(max_dn, g(i));
    }
    double nu = 0.0;
    if (p.use_equality && !coupled.empty()) {
      if (std::isfinite(min_up) && std::isfinite(max_dn))
        nu = -0.5 * (min_up + max_dn);
      else if (std::isfinite(min_up))
        nu = -min_up;
      else if (std::isfinite(max_dn))
        nu = -max_dn;
    }
    nu_out = nu;
    double stat = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (loz(i) == hiz(i)) continue;
      const bool in_s = p.use_equality && p.eq_vector(i) != 0.0;
      const double gi = g(i) + (in_s ? nu : 0.0);
      double r;
      if (z(i) <= loz(i))
        r = std::max(0.0, -gi);
      else if (z(i) >= hiz(i))
        r = std::max(0.0, gi);
      else
        r = std::fabs(gi);
      stat = std::max(stat, std::fabs(s(i)) * r);
    }
    return stat;
  };

  double nu = 0.0;
  while (iter < max_iter) {
    const double stat = nu_and_stat(nu);
    if (stat <= tol) break;

    bool moved = false;

    // one pair step on the equality-coupled set
    if (coupled.size() >= 2) {
      Eigen::Index iu = -1, id = -1;
      for (Eigen::Index i : coupled) {
        if (loz(i) == hiz(i)) continue;
        if (z(i) < hiz(i) && (iu < 0 || g(i) < g(iu))) iu = i;
        if (z(i) > loz(i) && (id < 0 || g(i) > g(id))) id = i;
      }
      if (iu >= 0 && id >= 0 && iu != id && g(id) - g(iu) > 0.0) {
        const double t_lo = std::max(loz(iu) - z(iu), z(id) - hiz(id));
        const double t_hi = std::min(hiz(iu) - z(iu), z(id) - loz(id));
        const double eta = q(iu, iu) + q(id, id) - 2.0 * q(iu, id);
        double t;
        if (eta > tiny) {
          t = clamp((g(id) - g(iu)) / eta, t_lo, t_hi);
        } else {
          // flat direction: objective falls linearly as t grows
          if (std::isinf(t_hi)) {
            unbounded = true;
            break;
          }
          t = t_hi;
        }
        if (t != 0.0) {
          z(iu) += t;
          z(id) -= t;
          g.noalias() += t * q.col(iu);
          g.noalias() -= t * q.col(id);
          moved = true;
        }
      }
    }

    // one exact step on the worst uncoupled coordinate
    Eigen::Index k = -1;
    double worst = tol;  // only act on genuine violations
    for (Eigen::Index i = 0; i < n; ++i) {
      if (p.use_equality && p.eq_vector(i) != 0.0) continue;
      if (loz(i) == hiz(i)) continue;
      double r;
      if (z(i) <= loz(i))
        r = std::max(0.0, -g(i));
      else if (z(i) >= hiz(i))
        r = std::max(0.0, g(i));
      else
        r = std::fabs(g(i));
      if (r > worst) {
        worst = r;
        k = i;
      }
    }
    if (k >= 0) {
      double t;
      if (q(k, k) > tiny) {
        t = clamp(z(k) - g(k) / q(k, k), loz(k), hiz(k)) - z(k);
      } else {
        const double target = g(k) < 0.0 ? hiz(k) : loz(k);
        if (std::isinf(target)) {
          unbounded = true;
          break;
        }
        t = target - z(k);
      }
      if (t != 0.0) {
        z(k) += t;
        g.noalias() += t * q.col(k);
        moved = true;
      }
    }

    ++iter;
    if (!moved) break;  // numerically stuck; certificate below decides the status
  }

  // recover x, snap into the box, and audit
  VectorXd x = z.cwiseProduct(inv_s);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = clamp(x(i), p.lower(i), p.upper(i));
  sol.x = x;
  sol.iterations = static_cast<int>(std::min<long>(iter, std::numeric_limits<int>::max()));
  sol.objective = 0.5 * x.dot(p.gram * x) + p.linear.dot(x);

  z = x.cwiseProduct(s);
  g = q * z + cz;
  const double stat = nu_and_stat(nu);
  double feas_res = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    feas_res = std::max({feas_res, p.lower(i) - x(i), x(i) - p.upper(i)});
  double eq_res = 0.0;
  if (p.use_equality) eq_res = std::fabs(p.eq_vector.dot(x) - p.eq_rhs);
  double comp = 0.0;
  const VectorXd gx = p.gram * x + p.linear;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double si = gx(i) + (p.use_equality ? nu * p.eq_vector(i) : 0.0);
    const double dist = std::min(x(i) - p.lower(i), p.upper(i) - x(i));
    comp = std::max(comp, std::min(std::fabs(si), std::max(dist, 0.0)));
  }
  sol.certificate.primal_feasibility = std::max(0.0, feas_res);
  sol.certificate.equality_residual = eq_res;
  sol.certificate.stationarity = stat;
  sol.certificate.complementarity = comp;

  if (unbounded)
    sol.status = SolverStatus::Unbounded;
  else if (stat <= tol && eq_res <= tol * (1.0 + std::fabs(p.eq_rhs)))
    sol.status = SolverStatus::Optimal;
  else
    sol.status = SolverStatus::IterationLimit;
  return sol;
}

}  // namespace kqr
