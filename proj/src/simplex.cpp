#include "emsp/simplex.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emsp {

namespace {

double scaled(double tol, double bound) { return tol * (1 + std::abs(bound)); }

}  // namespace

BoundedSimplex::BoundedSimplex(Eigen::MatrixXd a, Eigen::VectorXd row_lo, Eigen::VectorXd row_hi,
                               Eigen::VectorXd col_lo, Eigen::VectorXd col_hi,
                               Eigen::VectorXd cost)
    : a_(std::move(a)) {
  const int n = cols(), m = rows();
  if (row_lo.size() != m || row_hi.size() != m || col_lo.size() != n || col_hi.size() != n ||
      cost.size() != n)
    throw std::invalid_argument("BoundedSimplex: dimension mismatch");
  lo_.resize(n + m);
  hi_.resize(n + m);
  cost_ = Eigen::VectorXd::Zero(n + m);
  lo_ << col_lo, row_lo;
  hi_ << col_hi, row_hi;
  cost_.head(n) = cost;
  x_ = Eigen::VectorXd::Zero(n + m);
  status_.assign(n + m, VarStatus::at_lower);
  slack_basis();
}

void BoundedSimplex::place_nonbasic(int j) {
  auto& s = status_[j];
  const bool lo_ok = std::isfinite(lo_[j]), hi_ok = std::isfinite(hi_[j]);
  if (s == VarStatus::at_lower && !lo_ok) s = hi_ok ? VarStatus::at_upper : VarStatus::at_zero;
  if (s == VarStatus::at_upper && !hi_ok) s = lo_ok ? VarStatus::at_lower : VarStatus::at_zero;
  if (s == VarStatus::at_zero && (lo_ok || hi_ok)) s = lo_ok ? VarStatus::at_lower : VarStatus::at_upper;
  if (s == VarStatus::basic) s = lo_ok ? VarStatus::at_lower : hi_ok ? VarStatus::at_upper : VarStatus::at_zero;
  switch (s) {
    case VarStatus::at_lower: x_[j] = lo_[j]; break;
    case VarStatus::at_upper: x_[j] = hi_[j]; break;
    default: x_[j] = 0; break;
  }
}

void BoundedSimplex::slack_basis() {
  const int n = cols(), m = rows();
  head_.resize(m);
  for (int j = 0; j < n; ++j) {
    if (status_[j] == VarStatus::basic) status_[j] = VarStatus::at_lower;
    place_nonbasic(j);
  }
  for (int i = 0; i < m; ++i) {
    head_[i] = n + i;
    status_[n + i] = VarStatus::basic;
  }
  factor_valid_ = false;
}

void BoundedSimplex::set_col_bounds(int j, double lo, double hi) {
  lo_[j] = lo;
  hi_[j] = hi;
  if (status_[j] != VarStatus::basic) {
    place_nonbasic(j);
    values_stale_ = true;
  }
}

void BoundedSimplex::add_row(const Eigen::RowVectorXd& coefs, double lo, double hi) {
  if (coefs.size() != cols()) throw std::invalid_argument("add_row: wrong length");
  const int n = cols(), m = rows();
  a_.conservativeResize(m + 1, Eigen::NoChange);
  a_.row(m) = coefs;
  auto grow = [](Eigen::VectorXd& v, double value) {
    v.conservativeResize(v.size() + 1);
    v[v.size() - 1] = value;
  };
  grow(lo_, lo);
  grow(hi_, hi);
  grow(cost_, 0.0);
  grow(x_, 0.0);
  status_.push_back(VarStatus::basic);
  head_.push_back(n + m);
  factor_valid_ = false;
}

Eigen::VectorXd BoundedSimplex::solve_basis(const Eigen::VectorXd& b) const {
  const int n = cols(), m = rows(), k = static_cast<int>(ks_.size());
  Eigen::VectorXd br(k);
  for (int r = 0; r < k; ++r) br[r] = b[kr_[r]];
  const Eigen::VectorXd zs = kinv_ * br;
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) {
    const int v = head_[i];
    if (v < n) {
      z[i] = zs[spos_[v]];
    } else {
      const int l = v - n;
      double acc = -b[l];
      for (int t = 0; t < k; ++t) acc += a_(l, ks_[t]) * zs[t];
      z[i] = acc;
    }
  }
  return z;
}

Eigen::VectorXd BoundedSimplex::btran(const Eigen::VectorXd& cb) const {
  const int n = cols(), m = rows(), k = static_cast<int>(ks_.size());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd cs(k);
  for (int i = 0; i < m; ++i) {
    const int v = head_[i];
    if (v < n) cs[spos_[v]] = cb[i];
    else y[v - n] = -cb[i];
  }
  for (int i = 0; i < m; ++i) {
    const int v = head_[i];
    if (v < n || y[v - n] == 0) continue;
    const int l = v - n;
    for (int t = 0; t < k; ++t) cs[t] -= a_(l, ks_[t]) * y[l];
  }
  const Eigen::VectorXd yr = kinv_.transpose() * cs;
  for (int r = 0; r < k; ++r) y[kr_[r]] = yr[r];
  return y;
}

Eigen::VectorXd BoundedSimplex::ftran(int j) const {
  const int m = rows();
  if (j < cols()) return solve_basis(a_.col(j));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e[j - cols()] = -1;
  return solve_basis(e);
}

bool BoundedSimplex::replace_basic(int p, int q) {
  const int n = cols();
  const int v = head_[p];
  const int k = static_cast<int>(ks_.size());
  auto row_of = [&](int row) {
    Eigen::RowVectorXd w(k);
    for (int t = 0; t < k; ++t) w[t] = a_(row, ks_[t]);
    return w;
  };
  auto col_of = [&](int col) {
    Eigen::VectorXd u(k);
    for (int r = 0; r < k; ++r) u[r] = a_(kr_[r], col);
    return u;
  };
  bool ok = true;
  if (q < n && v >= n) {
    // Row v-n joins the kernel together with column q.
    const int i = v - n;
    const Eigen::VectorXd a = kinv_ * col_of(q);
    const Eigen::RowVectorXd w = row_of(i);
    const Eigen::RowVectorXd bt = w * kinv_;
    const double sc = a_(i, q) - w.dot(a);
    ok = std::abs(sc) > kPivotTol;
    Eigen::MatrixXd next(k + 1, k + 1);
    if (ok) {
      next.topLeftCorner(k, k) = kinv_ + a * bt / sc;
      next.topRightCorner(k, 1) = -a / sc;
      next.bottomLeftCorner(1, k) = -bt / sc;
      next(k, k) = 1 / sc;
    }
    kinv_ = std::move(next);
    ks_.push_back(q);
    kr_.push_back(i);
    spos_[q] = k;
    rpos_[i] = k;
  } else if (q >= n && v < n) {
    // Row q-n and column v leave the kernel.
    const int i = q - n;
    const int r0 = rpos_[i], c0 = spos_[v];
    if (r0 != k - 1) {
      kinv_.col(r0).swap(kinv_.col(k - 1));
      std::swap(kr_[r0], kr_[k - 1]);
      rpos_[kr_[r0]] = r0;
    }
    if (c0 != k - 1) {
      kinv_.row(c0).swap(kinv_.row(k - 1));
      std::swap(ks_[c0], ks_[k - 1]);
      spos_[ks_[c0]] = c0;
    }
    const double h = kinv_(k - 1, k - 1);
    ok = std::abs(h) > kPivotTol * 1e-3;
    Eigen::MatrixXd next = kinv_.topLeftCorner(k - 1, k - 1);
    if (ok) next.noalias() -= kinv_.topRightCorner(k - 1, 1) * kinv_.bottomLeftCorner(1, k - 1) / h;
    kinv_ = std::move(next);
    ks_.pop_back();
    kr_.pop_back();
    spos_[v] = -1;
    rpos_[i] = -1;
  } else if (q < n) {
    // Column q replaces column v.
    const int c0 = spos_[v];
    const Eigen::VectorXd d = kinv_ * col_of(q);
    ok = std::abs(d[c0]) > kPivotTol * 1e-3;
    if (ok) {
      const Eigen::RowVectorXd prow = kinv_.row(c0) / d[c0];
      kinv_.noalias() -= d * prow;
      kinv_.row(c0) = prow;
    }
    ks_[c0] = q;
    spos_[v] = -1;
    spos_[q] = c0;
  } else {
    // Row v-n replaces row q-n.
    const int i = q - n, j = v - n;
    const int r0 = rpos_[i];
    const Eigen::RowVectorXd d = row_of(j) * kinv_;
    ok = std::abs(d[r0]) > kPivotTol * 1e-3;
    if (ok) {
      const Eigen::VectorXd pcol = kinv_.col(r0) / d[r0];
      kinv_.noalias() -= pcol * d;
      kinv_.col(r0) = pcol;
    }
    kr_[r0] = j;
    rpos_[i] = -1;
    rpos_[j] = r0;
  }
  head_[p] = q;
  status_[q] = VarStatus::basic;
  ++since_refactor_;
  if (!ok) factor_valid_ = false;
  return ok;
}

bool BoundedSimplex::refactor() {
  const int m = rows();
  since_refactor_ = 0;
  const int n = cols();
  ks_.clear();
  kr_.clear();
  spos_.assign(n, -1);
  rpos_.assign(m, -1);
  std::vector<bool> logical_basic(m, false);
  for (int i = 0; i < m; ++i) {
    const int v = head_[i];
    if (v < n) {
      spos_[v] = static_cast<int>(ks_.size());
      ks_.push_back(v);
    } else {
      logical_basic[v - n] = true;
    }
  }
  for (int i = 0; i < m; ++i)
    if (!logical_basic[i]) {
      rpos_[i] = static_cast<int>(kr_.size());
      kr_.push_back(i);
    }
  const int k = static_cast<int>(ks_.size());
  if (static_cast<int>(kr_.size()) != k) {
    factor_valid_ = false;
    return false;
  }
  if (k > 0) {
    Eigen::MatrixXd kernel(k, k);
    for (int r = 0; r < k; ++r)
      for (int t = 0; t < k; ++t) kernel(r, t) = a_(kr_[r], ks_[t]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kernel);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff(), dmin = diag.minCoeff();
    if (!std::isfinite(dmax) || dmin <= 1e-13 * std::max(1.0, dmax)) {
      factor_valid_ = false;
      return false;
    }
    kinv_ = lu.inverse();
  } else {
    kinv_.resize(0, 0);
  }
  factor_valid_ = true;
  compute_basic_values();
  return true;
}

void BoundedSimplex::compute_basic_values() {
  const int n = cols(), m = rows();
  Eigen::VectorXd xs = x_.head(n);
  for (int i = 0; i < m; ++i)
    if (head_[i] < n) xs[head_[i]] = 0;
  Eigen::VectorXd rhs = -(a_ * xs);
  for (int i = 0; i < m; ++i)
    if (status_[n + i] != VarStatus::basic) rhs[i] += x_[n + i];
  const Eigen::VectorXd xb = solve_basis(rhs);
  for (int i = 0; i < m; ++i) x_[head_[i]] = xb[i];
  values_stale_ = false;
}

double BoundedSimplex::infeasibility(int j) const {
  if (x_[j] < lo_[j] - scaled(kPrimalTol, lo_[j])) return lo_[j] - x_[j];
  if (x_[j] > hi_[j] + scaled(kPrimalTol, hi_[j])) return x_[j] - hi_[j];
  return 0;
}

bool BoundedSimplex::primal_feasible(double tol) const {
  for (int j = 0; j < total(); ++j) {
    if (x_[j] < lo_[j] - scaled(tol, lo_[j])) return false;
    if (x_[j] > hi_[j] + scaled(tol, hi_[j])) return false;
  }
  return true;
}

double BoundedSimplex::objective() const { return cost_.dot(x_); }

Eigen::VectorXd BoundedSimplex::multipliers() const {
  Eigen::VectorXd cb(rows());
  for (int i = 0; i < rows(); ++i) cb[i] = cost_[head_[i]];
  return btran(cb);
}

Eigen::VectorXd BoundedSimplex::reduced_costs() const {
  const int n = cols();
  const Eigen::VectorXd pi = multipliers();
  Eigen::VectorXd d(total());
  d.head(n) = cost_.head(n) - a_.transpose() * pi;
  d.tail(rows()) = pi;
  for (int i = 0; i < rows(); ++i) d[head_[i]] = 0;
  return d;
}

bool BoundedSimplex::residuals_small(double tol) const {
  const int n = cols(), m = rows();
  const Eigen::VectorXd primal_res = a_ * x_.head(n) - x_.tail(m);
  for (int i = 0; i < m; ++i)
    if (std::abs(primal_res[i]) > scaled(tol, x_[n + i])) return false;
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb[i] = cost_[head_[i]];
  const Eigen::VectorXd pi = multipliers();
  for (int i = 0; i < m; ++i) {
    const int v = head_[i];
    const double btpi = v < n ? a_.col(v).dot(pi) : -pi[v - n];
    if (std::abs(btpi - cb[i]) > scaled(tol, cb[i])) return false;
  }
  return true;
}

bool BoundedSimplex::verify_optimality() {
  constexpr double tol = 1e-7;
  compute_basic_values();
  if (!residuals_small(tol) && !refactor()) return false;
  if (!primal_feasible(tol)) return false;
  const Eigen::VectorXd d = reduced_costs();
  for (int j = 0; j < total(); ++j) {
    switch (status_[j]) {
      case VarStatus::basic: break;
      case VarStatus::at_lower:
        if (lo_[j] < hi_[j] && d[j] < -tol) return false;
        break;
      case VarStatus::at_upper:
        if (lo_[j] < hi_[j] && d[j] > tol) return false;
        break;
      case VarStatus::at_zero:
        if (std::abs(d[j]) > tol) return false;
        break;
    }
  }
  return true;
}

void BoundedSimplex::set_basis(const std::vector<VarStatus>& status) {
  const int n = cols(), m = rows();
  if (static_cast<int>(status.size()) > total()) {
    slack_basis();
    return;
  }
  std::vector<VarStatus> st = status;
  while (static_cast<int>(st.size()) < total()) st.push_back(VarStatus::basic);
  std::vector<int> head;
  for (int j = 0; j < total(); ++j)
    if (st[j] == VarStatus::basic) head.push_back(j);
  if (static_cast<int>(head.size()) != m) {
    slack_basis();
    return;
  }
  status_ = std::move(st);
  head_ = std::move(head);
  for (int j = 0; j < n + m; ++j)
    if (status_[j] != VarStatus::basic) place_nonbasic(j);
  factor_valid_ = false;
}

BoundedSimplex::DualOutcome BoundedSimplex::dual_phase() {
  const int n = cols(), m = rows(), big_n = total();
  Eigen::VectorXd cb(m);
  {
    // Boxed nonbasics with the wrong reduced-cost sign move to their other bound.
    for (int i = 0; i < m; ++i) cb[i] = cost_[head_[i]];
    const Eigen::VectorXd pi = btran(cb);
    bool flipped = false;
    for (int j = 0; j < big_n; ++j) {
      const auto s = status_[j];
      if (s == VarStatus::basic || lo_[j] == hi_[j]) continue;
      const double dj = j < n ? cost_[j] - a_.col(j).dot(pi) : pi[j - n];
      const bool boxed = std::isfinite(lo_[j]) && std::isfinite(hi_[j]);
      if (s == VarStatus::at_lower && dj < -kDualTol && boxed) {
        status_[j] = VarStatus::at_upper;
        x_[j] = hi_[j];
        flipped = true;
      } else if (s == VarStatus::at_upper && dj > kDualTol && boxed) {
        status_[j] = VarStatus::at_lower;
        x_[j] = lo_[j];
        flipped = true;
      }
    }
    if (flipped) compute_basic_values();
  }
  const long max_iter = 10L * (big_n + m) + 1000;
  for (long it = 0; it < max_iter; ++it) {
    if (since_refactor_ >= kRefactorInterval && !refactor()) return DualOutcome::gave_up;

    int p = -1;
    double worst = 0;
    for (int i = 0; i < m; ++i) {
      const double inf = infeasibility(head_[i]);
      if (inf > worst) {
        worst = inf;
        p = i;
      }
    }
    if (p < 0) return DualOutcome::primal_feasible;

    for (int i = 0; i < m; ++i) cb[i] = cost_[head_[i]];
    const Eigen::VectorXd pi = btran(cb);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(m);
    unit[p] = 1;
    const Eigen::RowVectorXd rho = btran(unit).transpose();
    const int v = head_[p];
    const bool raise = x_[v] < lo_[v];
    const double target = raise ? lo_[v] : hi_[v];
    // x_v moves by -alpha_r[j] * dx_j; `need` is the sign of that motion.
    const double need = raise ? 1.0 : -1.0;

    int q = -1;
    double best_ratio = kInf, best_alpha = 0;
    for (int j = 0; j < big_n; ++j) {
      const auto s = status_[j];
      if (s == VarStatus::basic || lo_[j] == hi_[j]) continue;
      const double ar = j < n ? rho.dot(a_.col(j)) : -rho[j - n];
      if (std::abs(ar) <= kPivotTol) continue;
      const double dj = j < n ? cost_[j] - a_.col(j).dot(pi) : pi[j - n];
      int dir;  // direction x_j must move
      if (s == VarStatus::at_lower) {
        if (dj < -kDualTol) return DualOutcome::gave_up;
        dir = 1;
      } else if (s == VarStatus::at_upper) {
        if (dj > kDualTol) return DualOutcome::gave_up;
        dir = -1;
      } else {
        if (std::abs(dj) > kDualTol) return DualOutcome::gave_up;
        dir = -ar * need > 0 ? 1 : -1;
      }
      if (-ar * dir * need <= 0) continue;
      const double ratio = std::abs(dj) / std::abs(ar);
      if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && std::abs(ar) > best_alpha)) {
        best_ratio = ratio;
        best_alpha = std::abs(ar);
        q = j;
      }
    }
    if (q < 0) return worst > 1e-6 ? DualOutcome::infeasible : DualOutcome::gave_up;

    const Eigen::VectorXd alpha = ftran(q);
    if (std::abs(alpha[p]) <= kPivotTol) return DualOutcome::gave_up;
    const double t = (x_[v] - target) / alpha[p];
    x_[q] += t;
    for (int i = 0; i < m; ++i) x_[head_[i]] -= alpha[i] * t;
    x_[v] = target;
    status_[v] = raise ? VarStatus::at_lower : VarStatus::at_upper;
    ++iterations_;
    if (!replace_basic(p, q) && !refactor()) return DualOutcome::gave_up;
  }
  return DualOutcome::gave_up;
}

LpStatus BoundedSimplex::solve() {
  const int n = cols(), m = rows(), big_n = total();
  if (!factor_valid_ && !refactor()) {
    slack_basis();
    if (!refactor()) return LpStatus::numerical_failure;
  }
  if (values_stale_) compute_basic_values();
  switch (dual_phase()) {
    case DualOutcome::infeasible:
      // Confirm on a fresh factorisation before reporting.
      if (refactor() && dual_phase() == DualOutcome::infeasible) return LpStatus::infeasible;
      break;
    default: break;
  }
  if (!factor_valid_ && !refactor()) {
    slack_basis();
    if (!refactor()) return LpStatus::numerical_failure;
  }

  const long max_iter = 50L * (big_n + m) + 10000;
  long local_iter = 0;
  int degenerate = 0;
  bool bland = false;
  int verify_failures = 0;
  int unbounded_retries = 0;
  Eigen::VectorXd cb(m), d(big_n);

  while (true) {
    if (local_iter++ > max_iter) return LpStatus::iteration_limit;
    if (since_refactor_ >= kRefactorInterval && !refactor()) {
      slack_basis();
      if (!refactor()) return LpStatus::numerical_failure;
    }

    bool phase1 = false;
    for (int i = 0; i < m; ++i) {
      const int v = head_[i];
      if (x_[v] < lo_[v] - scaled(kPrimalTol, lo_[v])) {
        cb[i] = -1;
        phase1 = true;
      } else if (x_[v] > hi_[v] + scaled(kPrimalTol, hi_[v])) {
        cb[i] = 1;
        phase1 = true;
      } else {
        cb[i] = 0;
      }
    }
    if (!phase1)
      for (int i = 0; i < m; ++i) cb[i] = cost_[head_[i]];

    const Eigen::VectorXd pi = btran(cb);
    if (phase1)
      d.head(n) = -(a_.transpose() * pi);
    else
      d.head(n) = cost_.head(n) - a_.transpose() * pi;
    d.tail(m) = pi;

    // Pricing.
    int q = -1, dir = 0;
    double best = 0;
    for (int j = 0; j < big_n; ++j) {
      const auto s = status_[j];
      if (s == VarStatus::basic || lo_[j] == hi_[j]) continue;
      int jdir = 0;
      if (s == VarStatus::at_lower && d[j] < -kDualTol) jdir = 1;
      else if (s == VarStatus::at_upper && d[j] > kDualTol) jdir = -1;
      else if (s == VarStatus::at_zero && std::abs(d[j]) > kDualTol) jdir = d[j] < 0 ? 1 : -1;
      if (jdir == 0) continue;
      if (bland) {
        q = j;
        dir = jdir;
        break;
      }
      if (std::abs(d[j]) > best) {
        best = std::abs(d[j]);
        q = j;
        dir = jdir;
      }
    }

    if (q < 0) {
      if (phase1) {
        if (!refactor()) {
          slack_basis();
          if (!refactor()) return LpStatus::numerical_failure;
          continue;
        }
        bool still = false;
        for (int i = 0; i < m; ++i) still = still || infeasibility(head_[i]) > 0;
        if (still) return LpStatus::infeasible;
        continue;
      }
      if (verify_optimality()) return LpStatus::optimal;
      if (++verify_failures > 3) return LpStatus::numerical_failure;
      if (!refactor()) {
        slack_basis();
        if (!refactor()) return LpStatus::numerical_failure;
      }
      continue;
    }

    const Eigen::VectorXd alpha = ftran(q);

    // Ratio test. Basic variable i moves at rate -alpha_i * dir.
    struct Limit {
      int row;
      double ratio;
      double relaxed;
      double bound;
    };
    std::vector<Limit> limits;
    limits.reserve(8);
    for (int i = 0; i < m; ++i) {
      const double ai = alpha[i];
      if (std::abs(ai) <= kPivotTol) continue;
      const int v = head_[i];
      const double rate = -ai * dir;
      const double xv = x_[v];
      double bound, dist;
      if (rate < 0) {
        if (phase1 && xv > hi_[v] + scaled(kPrimalTol, hi_[v])) {
          bound = hi_[v];
        } else if (xv < lo_[v] - scaled(kPrimalTol, lo_[v]) || !std::isfinite(lo_[v])) {
          continue;
        } else {
          bound = lo_[v];
        }
        dist = xv - bound;
      } else {
        if (phase1 && xv < lo_[v] - scaled(kPrimalTol, lo_[v])) {
          bound = lo_[v];
        } else if (xv > hi_[v] + scaled(kPrimalTol, hi_[v]) || !std::isfinite(hi_[v])) {
          continue;
        } else {
          bound = hi_[v];
        }
        dist = bound - xv;
      }
      const double r = std::abs(rate);
      limits.push_back({i, dist / r, (dist + scaled(kPrimalTol, bound)) / r, bound});
    }

    int p = -1;
    double t = kInf, leave_bound = 0;
    if (!limits.empty()) {
      if (bland) {
        double tmin = kInf;
        for (const auto& l : limits) tmin = std::min(tmin, l.ratio);
        int best_var = -1;
        for (const auto& l : limits) {
          if (l.ratio <= tmin + 1e-12 && (best_var < 0 || head_[l.row] < best_var)) {
            best_var = head_[l.row];
            p = l.row;
            t = l.ratio;
            leave_bound = l.bound;
          }
        }
      } else {
        double tmax = kInf;
        for (const auto& l : limits) tmax = std::min(tmax, l.relaxed);
        double best_pivot = -1;
        for (const auto& l : limits) {
          if (l.ratio <= tmax && std::abs(alpha[l.row]) > best_pivot) {
            best_pivot = std::abs(alpha[l.row]);
            p = l.row;
            t = l.ratio;
            leave_bound = l.bound;
          }
        }
      }
      t = std::max(0.0, t);
    }

    bool flip = false;
    if (std::isfinite(lo_[q]) && std::isfinite(hi_[q]) && hi_[q] - lo_[q] <= t) {
      flip = true;
      t = hi_[q] - lo_[q];
    }

    if (p < 0 && !flip) {
      if (++unbounded_retries <= 2 && refactor()) continue;
      return phase1 ? LpStatus::numerical_failure : LpStatus::unbounded;
    }

    x_[q] += dir * t;
    for (int i = 0; i < m; ++i) x_[head_[i]] -= alpha[i] * dir * t;

    if (flip) {
      status_[q] = dir > 0 ? VarStatus::at_upper : VarStatus::at_lower;
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
    } else {
      const int v = head_[p];
      x_[v] = leave_bound;
      status_[v] = leave_bound == lo_[v] ? VarStatus::at_lower : VarStatus::at_upper;
      if (!replace_basic(p, q) && !refactor()) {
        slack_basis();
        if (!refactor()) return LpStatus::numerical_failure;
      }
    }
    ++iterations_;
    if (bland) ++bland_pivots_;

    if (t <= 1e-12) {
      if (++degenerate > 5 * big_n) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

}  // namespace emsp
