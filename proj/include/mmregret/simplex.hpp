#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace mmr::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// maximize c.x  subject to  A x <= b,  0 <= x <= upper.
/// Requires b >= 0 so the all-slack basis is feasible.
struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;      // rows * cols, row-major
  std::vector<double> b;      // rows
  std::vector<double> c;      // cols
  std::vector<double> upper;  // cols, kInf for no upper bound

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_cols)
      : cols(num_cols), c(num_cols, 0.0), upper(num_cols, kInf) {}

  /// Appends a row sum_k coeffs[k] x_k <= rhs; returns its index.
  std::size_t add_row(const std::vector<double>& coeffs, double rhs);
};

enum class LpStatus { Optimal, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
  std::size_t degenerate_pivots = 0;
  bool extended_precision = false;
};

struct SimplexOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 0;  // 0: 50 * (rows + cols)
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 64;
};

/// Dense tableau primal simplex with implicit variable upper bounds. Dantzig pricing,
/// falling back to Bland's rule while stalling. Returns the solution in double; if the
/// double-precision run fails or its answer violates the constraints, the solve is
/// repeated in long double and throws Error{NumericalFailure} if that fails as well.
LpSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Solve in one fixed precision, without retry.
LpSolution solve_double(const LinearProgram& lp, const SimplexOptions& options = {});
LpSolution solve_long_double(const LinearProgram& lp, const SimplexOptions& options = {});

/// Largest violation of A x <= b and 0 <= x <= upper.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace mmr::lp
