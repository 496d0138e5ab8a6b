#include "drmg/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace drmg {

void LinearProgram::add_le(std::vector<double> row, double rhs) {
  if (static_cast<int>(row.size()) != num_vars) throw std::invalid_argument("constraint row has wrong length");
  le_rows.push_back(std::move(row));
  le_rhs.push_back(rhs);
}

void LinearProgram::add_ge(std::vector<double> row, double rhs) {
  for (double& v : row) v = -v;
  add_le(std::move(row), -rhs);
}

void LinearProgram::add_eq(std::vector<double> row, double rhs) {
  if (static_cast<int>(row.size()) != num_vars) throw std::invalid_argument("constraint row has wrong length");
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(rhs);
}

namespace {

enum class Outcome { kOptimal, kUnbounded };

// Revised simplex on  A z = b, z >= 0  with b >= 0. The basis is refactorised
// from A at every iteration, so rounding does not accumulate across pivots.
class RevisedSimplex {
 public:
  RevisedSimplex(Eigen::MatrixXd a, Eigen::VectorXd b, std::vector<int> basis, int first_artificial, double tol)
      : a_(std::move(a)),
        b_(std::move(b)),
        basis_(std::move(basis)),
        first_artificial_(first_artificial),
        tol_(tol),
        basic_(a_.cols(), false) {
    for (int j : basis_) basic_[j] = true;
  }

  // Maximises c^T z. With `pin_artificials`, basic artificials are held at 0.
  Outcome maximize(const Eigen::VectorXd& c, bool pin_artificials) {
    constexpr int kMaxIterations = 50000;
    constexpr int kBlandAfter = 30;  // consecutive degenerate pivots
    constexpr double kFeasibility = 1e-12;
    const int m = static_cast<int>(basis_.size());
    int degenerate_run = 0;
    bool bland = false;  // once on, stays on for this phase so it cannot cycle
    for (int it = 0; it < kMaxIterations; ++it) {
      factorize();
      const Eigen::VectorXd xb = lu_.solve(b_);
      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb[i] = c[basis_[i]];
      const Eigen::VectorXd y = lu_.transpose().solve(cb);

      bland = bland || degenerate_run >= kBlandAfter;
      int enter = -1;
      double best = tol_;
      for (int j = 0; j < first_artificial_; ++j) {
        if (basic_[j]) continue;
        const double d = c[j] - y.dot(a_.col(j));
        if (d > best) {
          enter = j;
          best = d;
          if (bland) break;
        }
      }
      if (enter < 0) return Outcome::kOptimal;

      const Eigen::VectorXd w = lu_.solve(a_.col(enter));
      // Harris ratio test: the largest step that keeps every basic variable
      // above -kFeasibility, then the largest pivot among rows blocking
      // within that step.
      auto blocks = [&](int i) {
        return pin_artificials && basis_[i] >= first_artificial_ ? std::abs(w[i]) > tol_ : w[i] > tol_;
      };
      double step_cap = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (blocks(i)) step_cap = std::min(step_cap, (std::max(0.0, xb[i]) + kFeasibility) / std::abs(w[i]));
      }
      auto candidate = [&](int i) { return blocks(i) && std::max(0.0, xb[i]) / std::abs(w[i]) <= step_cap; };
      double largest_pivot = 0.0;
      for (int i = 0; i < m; ++i) {
        if (candidate(i)) largest_pivot = std::max(largest_pivot, std::abs(w[i]));
      }
      // Bland's rule picks the lowest basis index, but only among pivots of
      // comparable size so the basis stays well conditioned.
      int leave = -1;
      for (int i = 0; i < m; ++i) {
        if (!candidate(i)) continue;
        if (bland) {
          if (std::abs(w[i]) >= 1e-3 * largest_pivot && (leave < 0 || basis_[i] < basis_[leave])) leave = i;
        } else if (leave < 0 || std::abs(w[i]) > std::abs(w[leave])) {
          leave = i;
        }
      }
      if (leave < 0) return Outcome::kUnbounded;
      const double step = std::max(0.0, xb[leave]) / std::abs(w[leave]);
      degenerate_run = best * step <= 1e-12 ? degenerate_run + 1 : 0;
      swap_in(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  // Pivots zero-level artificials out of the basis where a real column can
  // replace them; the ones left mark redundant rows.
  void drive_out_artificials() {
    const int m = static_cast<int>(basis_.size());
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < first_artificial_) continue;
      factorize();
      const Eigen::VectorXd rho = lu_.transpose().solve(Eigen::VectorXd::Unit(m, i));
      int best = -1;
      double best_alpha = 1e-7;
      for (int j = 0; j < first_artificial_; ++j) {
        if (basic_[j]) continue;
        const double alpha = std::abs(rho.dot(a_.col(j)));
        if (alpha > best_alpha) {
          best = j;
          best_alpha = alpha;
        }
      }
      if (best >= 0) swap_in(i, best);
    }
  }

  Eigen::VectorXd values() {
    factorize();
    const Eigen::VectorXd xb = lu_.solve(b_);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(a_.cols());
    for (std::size_t i = 0; i < basis_.size(); ++i) z[basis_[i]] = std::max(0.0, xb[i]);
    return z;
  }

 private:
  void factorize() {
    Eigen::MatrixXd basis_matrix(a_.rows(), static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t i = 0; i < basis_.size(); ++i) basis_matrix.col(i) = a_.col(basis_[i]);
    lu_.compute(basis_matrix);
  }

  void swap_in(int row, int column) {
    basic_[basis_[row]] = false;
    basis_[row] = column;
    basic_[column] = true;
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<int> basis_;
  int first_artificial_;
  double tol_;
  std::vector<bool> basic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tol) {
  const int n = lp.num_vars;
  const int m_le = static_cast<int>(lp.le_rows.size());
  const int m_eq = static_cast<int>(lp.eq_rows.size());
  const int m = m_le + m_eq;

  // Columns: original variables, one slack per <= row, one artificial per row
  // that cannot start with its slack in the basis.
  std::vector<int> artificial_of_row(m, -1);
  int num_artificial = 0;
  for (int r = 0; r < m_le; ++r) {
    if (lp.le_rhs[r] < 0.0) artificial_of_row[r] = num_artificial++;
  }
  for (int r = 0; r < m_eq; ++r) artificial_of_row[m_le + r] = num_artificial++;

  const int slack0 = n;
  const int art0 = n + m_le;
  const int cols = art0 + num_artificial;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, cols);
  Eigen::VectorXd b(m);
  std::vector<int> basis(m, -1);

  for (int r = 0; r < m; ++r) {
    const bool is_le = r < m_le;
    const auto& row = is_le ? lp.le_rows[r] : lp.eq_rows[r - m_le];
    const double rhs = is_le ? lp.le_rhs[r] : lp.eq_rhs[r - m_le];
    const double sign = rhs < 0.0 ? -1.0 : 1.0;
    for (int c = 0; c < n; ++c) a(r, c) = sign * row[c];
    if (is_le) a(r, slack0 + r) = sign;
    b[r] = sign * rhs;
    if (artificial_of_row[r] >= 0) {
      a(r, art0 + artificial_of_row[r]) = 1.0;
      basis[r] = art0 + artificial_of_row[r];
    } else {
      basis[r] = slack0 + r;
    }
  }

  RevisedSimplex simplex(std::move(a), b, std::move(basis), art0, tol);

  // Phase 1: maximise -sum(artificials).
  if (num_artificial > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(num_artificial).setConstant(-1.0);
    simplex.maximize(phase1, false);
    const double residual = simplex.values().tail(num_artificial).sum();
    if (residual > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) return {LpStatus::kInfeasible, {}, 0.0};
    simplex.drive_out_artificials();
  }

  // Phase 2: the real objective.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  for (int c = 0; c < n; ++c) phase2[c] = lp.objective[c];
  if (simplex.maximize(phase2, true) == Outcome::kUnbounded) return {LpStatus::kUnbounded, {}, 0.0};

  const Eigen::VectorXd z = simplex.values();
  LpSolution sol;
  sol.status = LpStatus::kOptimal;
  sol.x.assign(z.data(), z.data() + n);
  sol.objective = 0.0;
  for (int c = 0; c < n; ++c) sol.objective += lp.objective[c] * sol.x[c];
  return sol;
}

}  // namespace drmg
