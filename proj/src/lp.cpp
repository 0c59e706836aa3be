#include "kqr/solvers/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-9;   // minimum pivot magnitude
constexpr int kStallLimit = 64;      // degenerate pivots before Bland mode

enum class VarKind { Shift, Flip, Split };

struct VarMap {
  VarKind kind;
  Eigen::Index col_a = -1;
  Eigen::Index col_b = -1;  // Split only
  double offset = 0.0;
};

void validate(const LpProblem& p) {
  const Eigen::Index n = p.cost.size();
  if (p.lower.size() != n || p.upper.size() != n)
    throw std::invalid_argument("solve_lp: bound size mismatch");
  if (p.eq_matrix.rows() != p.eq_rhs.size() ||
      (p.eq_matrix.rows() > 0 && p.eq_matrix.cols() != n))
    throw std::invalid_argument("solve_lp: equality block mismatch");
  if (p.ub_matrix.rows() != p.ub_rhs.size() ||
      (p.ub_matrix.rows() > 0 && p.ub_matrix.cols() != n))
    throw std::invalid_argument("solve_lp: inequality block mismatch");
  for (Eigen::Index j = 0; j < n; ++j)
    if (p.lower(j) > p.upper(j))
      throw std::invalid_argument("solve_lp: lower bound exceeds upper bound");
}

}  // namespace

SolverSolution solve_lp(const LpProblem& p, double tol, long max_iter) {
  validate(p);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_lp: tol must be > 0");
  const Eigen::Index n = p.cost.size();
  const Eigen::Index n_eq = p.eq_matrix.rows();
  const Eigen::Index n_ub = p.ub_matrix.rows();

  // --- standard form: min c'v, A v = b, v >= 0 ---
  std::vector<VarMap> map(static_cast<std::size_t>(n));
  Eigen::Index n_struct = 0;
  Eigen::Index n_range = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    VarMap& m = map[static_cast<std::size_t>(j)];
    const double lo = p.lower(j), hi = p.upper(j);
    if (std::isfinite(lo)) {
      m.kind = VarKind::Shift;
      m.offset = lo;
      m.col_a = n_struct++;
      if (std::isfinite(hi)) ++n_range;  // v_a <= hi - lo
    } else if (std::isfinite(hi)) {
      m.kind = VarKind::Flip;
      m.offset = hi;
      m.col_a = n_struct++;
    } else {
      m.kind = VarKind::Split;
      m.col_a = n_struct++;
      m.col_b = n_struct++;
    }
  }
  const Eigen::Index rows = n_eq + n_ub + n_range;
  const Eigen::Index n_slack = n_ub + n_range;

  // structural + slack columns, rhs; artificial columns appended after scan
  MatrixXd a = MatrixXd::Zero(rows, n_struct + n_slack);
  VectorXd b = VectorXd::Zero(rows);
  VectorXd cost = VectorXd::Zero(n_struct + n_slack);
  for (Eigen::Index j = 0; j < n; ++j) {
    const VarMap& m = map[static_cast<std::size_t>(j)];
    switch (m.kind) {
      case VarKind::Shift: cost(m.col_a) = p.cost(j); break;
      case VarKind::Flip: cost(m.col_a) = -p.cost(j); break;
      case VarKind::Split:
        cost(m.col_a) = p.cost(j);
        cost(m.col_b) = -p.cost(j);
        break;
    }
  }
  auto fill_row = [&](Eigen::Index r, const Eigen::Ref<const Eigen::RowVectorXd>& arow,
                      double rhs) {
    double shift = rhs;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = arow(j);
      if (v == 0.0) continue;
      const VarMap& m = map[static_cast<std::size_t>(j)];
      switch (m.kind) {
        case VarKind::Shift:
          a(r, m.col_a) += v;
          shift -= v * m.offset;
          break;
        case VarKind::Flip:
          a(r, m.col_a) -= v;
          shift -= v * m.offset;
          break;
        case VarKind::Split:
          a(r, m.col_a) += v;
          a(r, m.col_b) -= v;
          break;
      }
    }
    b(r) = shift;
  };
  for (Eigen::Index r = 0; r < n_eq; ++r) fill_row(r, p.eq_matrix.row(r), p.eq_rhs(r));
  for (Eigen::Index r = 0; r < n_ub; ++r) {
    fill_row(n_eq + r, p.ub_matrix.row(r), p.ub_rhs(r));
    a(n_eq + r, n_struct + r) = 1.0;  // slack
  }
  {
    Eigen::Index r = n_eq + n_ub, s = n_ub;
    for (Eigen::Index j = 0; j < n; ++j) {
      const VarMap& m = map[static_cast<std::size_t>(j)];
      if (m.kind == VarKind::Shift && std::isfinite(p.upper(j))) {
        a(r, m.col_a) = 1.0;
        a(r, n_struct + s) = 1.0;
        b(r) = p.upper(j) - p.lower(j);
        ++r;
        ++s;
      }
    }
  }

  // flip rows to make rhs nonnegative; rows without a usable +1 slack get artificials
  std::vector<Eigen::Index> art_rows;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (b(r) < 0.0) {
      a.row(r) = -a.row(r);
      b(r) = -b(r);
    }
    const bool slack_ok =
        r >= n_eq && a(r, n_struct + (r - n_eq)) > 0.0;  // +1 survived the flip
    if (!slack_ok) art_rows.push_back(r);
  }
  const Eigen::Index n_art = static_cast<Eigen::Index>(art_rows.size());
  const Eigen::Index n_cols = n_struct + n_slack + n_art;  // + rhs col in tableau
  const Eigen::Index rhs_col = n_cols;

  MatrixXd t(rows + 1, n_cols + 1);
  t.setZero();
  t.block(0, 0, rows, n_struct + n_slack) = a;
  t.block(0, rhs_col, rows, 1) = b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index r = n_eq; r < n_eq + n_slack; ++r)
    basis[static_cast<std::size_t>(r)] = n_struct + (r - n_eq);
  for (Eigen::Index k = 0; k < n_art; ++k) {
    const Eigen::Index r = art_rows[static_cast<std::size_t>(k)];
    t(r, n_struct + n_slack + k) = 1.0;
    basis[static_cast<std::size_t>(r)] = n_struct + n_slack + k;
  }

  if (max_iter <= 0) max_iter = 50L * static_cast<long>(n_cols);
  long iters = 0;
  const Eigen::Index obj_row = rows;

  auto rebuild_obj_row = [&](const VectorXd& c, Eigen::Index c_len) {
    t.row(obj_row).setZero();
    t.row(obj_row).head(c_len) = c.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index v = basis[static_cast<std::size_t>(r)];
      if (v < c_len && c(v) != 0.0) t.row(obj_row) -= c(v) * t.row(r);
    }
  };

  auto pivot = [&](Eigen::Index enter, Eigen::Index leave) {
    const VectorXd col = t.col(enter);
    const Eigen::RowVectorXd prow = t.row(leave) / col(leave);
    t.row(leave) = prow;
    VectorXd factors = col;
    factors(leave) = 0.0;
    t.noalias() -= factors * prow;
    t.col(enter).setZero();
    t(leave, enter) = 1.0;
    basis[static_cast<std::size_t>(leave)] = enter;
  };

  // returns false on unbounded (phase 2 only)
  auto run_simplex = [&](Eigen::Index enter_limit, double eps_d) -> bool {
    int stalled = 0;
    double best_obj = -t(obj_row, rhs_col);
    while (iters < max_iter) {
      const bool bland = stalled >= kStallLimit;
      Eigen::Index enter = -1;
      double best_d = -eps_d;
      for (Eigen::Index j = 0; j < enter_limit; ++j) {
        const double d = t(obj_row, j);
        if (d < best_d) {
          enter = j;
          if (bland) break;  // lowest index with negative reduced cost
          best_d = d;
        }
      }
      if (enter < 0) return true;  // optimal for this phase
      // ratio test; ties by smallest basic-variable index
      Eigen::Index leave = -1;
      double best_ratio = kInf;
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double piv = t(r, enter);
        if (piv <= kPivotEps) continue;
        const double ratio = t(r, rhs_col) / piv;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;  // unbounded direction
      pivot(enter, leave);
      ++iters;
      const double obj = -t(obj_row, rhs_col);
      if (obj < best_obj - 1e-12 * (1.0 + std::fabs(best_obj))) {
        best_obj = obj;
        stalled = 0;
      } else {
        ++stalled;
      }
    }
    return true;  // iteration cap; caller inspects iters
  };

  const double cost_scale = 1.0 + (cost.size() > 0 ? cost.cwiseAbs().maxCoeff() : 0.0);
  const double rhs_scale = 1.0 + (rows > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  SolverSolution sol;
  bool feasible = true;
  bool hit_limit = false;

  if (n_art > 0) {
    VectorXd phase1 = VectorXd::Zero(n_cols);
    phase1.segment(n_struct + n_slack, n_art).setOnes();
    rebuild_obj_row(phase1, n_cols);
    run_simplex(n_cols, tol);  // artificials may enter during phase 1
    const double art_level = -t(obj_row, rhs_col);
    if (art_level > tol * rhs_scale) {
      if (iters >= max_iter)
        hit_limit = true;
      else
        feasible = false;
    } else {
      // evict zero-level artificials so phase 2 cannot disturb their rows
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (basis[static_cast<std::size_t>(r)] < n_struct + n_slack) continue;
        for (Eigen::Index j = 0; j < n_struct + n_slack; ++j) {
          if (std::fabs(t(r, j)) > kPivotEps) {
            pivot(j, r);
            break;
          }
        }
        // an all-zero row is redundant; its artificial stays basic at level zero
      }
    }
  }

  bool unbounded = false;
  if (feasible && !hit_limit) {
    rebuild_obj_row(cost, n_struct + n_slack);
    unbounded = !run_simplex(n_struct + n_slack, tol * cost_scale);
    hit_limit = iters >= max_iter && !unbounded;
  }

  // recover original variables from the final basis
  VectorXd v = VectorXd::Zero(n_cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index j = basis[static_cast<std::size_t>(r)];
    v(j) = t(r, rhs_col);
  }
  VectorXd x(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const VarMap& m = map[static_cast<std::size_t>(j)];
    switch (m.kind) {
      case VarKind::Shift: x(j) = m.offset + v(m.col_a); break;
      case VarKind::Flip: x(j) = m.offset - v(m.col_a); break;
      case VarKind::Split: x(j) = v(m.col_a) - v(m.col_b); break;
    }
  }
  sol.x = x;
  sol.objective = n > 0 ? p.cost.dot(x) : 0.0;
  sol.iterations = static_cast<int>(std::min<long>(iters, std::numeric_limits<int>::max()));

  double feas_res = 0.0;
  for (Eigen::Index r = 0; r < n_eq; ++r)
    feas_res = std::max(feas_res, std::fabs(p.eq_matrix.row(r).dot(x) - p.eq_rhs(r)));
  for (Eigen::Index r = 0; r < n_ub; ++r)
    feas_res = std::max(feas_res, p.ub_matrix.row(r).dot(x) - p.ub_rhs(r));
  for (Eigen::Index j = 0; j < n; ++j)
    feas_res = std::max({feas_res, p.lower(j) - x(j), x(j) - p.upper(j)});
  feas_res = std::max(feas_res, 0.0);

  double stat_res = 0.0;
  double comp_res = 0.0;
  if (feasible && !unbounded) {
    for (Eigen::Index j = 0; j < n_struct + n_slack; ++j)
      stat_res = std::max(stat_res, -t(obj_row, j));
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index j = basis[static_cast<std::size_t>(r)];
      if (j < n_struct + n_slack)
        comp_res = std::max(comp_res, std::fabs(t(obj_row, j)) * std::fabs(t(r, rhs_col)));
    }
  }
  sol.certificate.primal_feasibility = feas_res;
  sol.certificate.equality_residual = feas_res;
  sol.certificate.stationarity = stat_res;
  sol.certificate.complementarity = comp_res;

  const double feas_budget =
      10.0 * tol * rhs_scale * std::max(1.0, n > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
  if (!feasible)
    sol.status = SolverStatus::Infeasible;
  else if (unbounded)
    sol.status = SolverStatus::Unbounded;
  else if (hit_limit || feas_res > feas_budget)
    sol.status = SolverStatus::IterationLimit;
  else
    sol.status = SolverStatus::Optimal;
  return sol;
}

}  // namespace kqr
