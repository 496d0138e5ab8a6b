#pragma once

#include <vector>

namespace drmg {

/// Dense linear program in the form
///   maximize c^T x  subject to  A_le x <= b_le,  A_eq x = b_eq,  x >= 0.
/// Sized for the small problems that appear here (up to a few hundred variables).
struct LinearProgram {
  explicit LinearProgram(int num_vars) : num_vars(num_vars), objective(num_vars, 0.0) {}

  void add_le(std::vector<double> row, double rhs);
  void add_ge(std::vector<double> row, double rhs);
  void add_eq(std::vector<double> row, double rhs);

  int num_vars;
  std::vector<double> objective;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
};

/// Two-phase revised simplex. The basis is refactorised (dense LU) at every
/// iteration; pricing is Dantzig's rule, switching to Bland's rule after a run
/// of degenerate pivots. Entries with magnitude below `pivot_tolerance` are
/// treated as zero when choosing pivots.
LpSolution solve_lp(const LinearProgram& lp, double pivot_tolerance = 1e-9);

}  // namespace drmg
