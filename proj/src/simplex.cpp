#include "mmregret/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "mmregret/error.hpp"
#include "mmregret/simd/kernels.hpp"

namespace mmr::lp {

std::size_t LinearProgram::add_row(const std::vector<double>& coeffs, double rhs) {
  if (coeffs.size() != cols) throw Error(ErrorCode::ShapeMismatch, "row length differs from column count");
  if (!(rhs >= 0.0)) throw Error(ErrorCode::OutOfRange, "right-hand sides must be non-negative");
  a.insert(a.end(), coeffs.begin(), coeffs.end());
  b.push_back(rhs);
  return rows++;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t r = 0; r < lp.rows; ++r) {
    double lhs = 0.0;
    for (std::size_t k = 0; k < lp.cols; ++k) lhs += lp.a[r * lp.cols + k] * x[k];
    worst = std::max(worst, lhs - lp.b[r]);
  }
  for (std::size_t k = 0; k < lp.cols; ++k) {
    worst = std::max(worst, -x[k]);
    if (std::isfinite(lp.upper[k])) worst = std::max(worst, x[k] - lp.upper[k]);
  }
  return worst;
}

namespace {

template <typename Real>
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opt)
      : m_(lp.rows), n_(lp.cols), width_(lp.cols + lp.rows), tol_(static_cast<Real>(opt.tolerance)),
        opt_(opt), t_(m_ * width_, Real(0)), cost_(width_, Real(0)), upper_(width_), at_upper_(width_, false),
        basis_(m_), value_(m_) {
    for (std::size_t r = 0; r < m_; ++r) {
      if (lp.b[r] < 0.0) throw Error(ErrorCode::NumericalFailure, "simplex needs b >= 0 (origin feasible)");
      for (std::size_t k = 0; k < n_; ++k) t_[r * width_ + k] = static_cast<Real>(lp.a[r * n_ + k]);
      t_[r * width_ + n_ + r] = Real(1);
      basis_[r] = n_ + r;
      value_[r] = static_cast<Real>(lp.b[r]);
    }
    for (std::size_t k = 0; k < n_; ++k) {
      cost_[k] = static_cast<Real>(lp.c[k]);  // reduced costs of a maximization
      upper_[k] = lp.upper[k];
    }
    for (std::size_t k = n_; k < width_; ++k) upper_[k] = kInf;
  }

  LpSolution run() {
    LpSolution sol;
    sol.extended_precision = !std::is_same_v<Real, double>;
    const std::size_t limit = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + n_) + 1000;
    std::size_t stall = 0;
    std::vector<std::size_t> row_of(width_, npos);
    for (std::size_t r = 0; r < m_; ++r) row_of[basis_[r]] = r;

    while (sol.iterations < limit) {
      const bool bland = stall >= opt_.bland_after;
      // Pricing.
      std::size_t enter = npos;
      Real best = tol_;
      for (std::size_t k = 0; k < width_; ++k) {
        if (row_of[k] != npos) continue;
        const Real gain = at_upper_[k] ? -cost_[k] : cost_[k];
        if (gain > best) {
          enter = k;
          if (bland) break;
          best = gain;
        }
      }
      if (enter == npos) {
        sol.status = LpStatus::Optimal;
        break;
      }
      const Real dir = at_upper_[enter] ? Real(-1) : Real(1);

      // Ratio test, including the entering variable's own bound flip.
      Real theta = std::isfinite(upper_[enter]) ? static_cast<Real>(upper_[enter]) : Real(INFINITY);
      std::size_t leave_row = npos;
      bool leave_to_upper = false;
      for (std::size_t r = 0; r < m_; ++r) {
        const Real alpha = dir * t_[r * width_ + enter];
        Real ratio;
        bool to_upper;
        if (alpha > tol_) {
          ratio = value_[r] / alpha;
          to_upper = false;
        } else if (alpha < -tol_ && std::isfinite(upper_[basis_[r]])) {
          ratio = (static_cast<Real>(upper_[basis_[r]]) - value_[r]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        ratio = std::max(ratio, Real(0));
        bool take = ratio < theta;
        if (!take && ratio == theta && leave_row != npos) {
          take = bland ? basis_[r] < basis_[leave_row]
                       : std::abs(alpha) > std::abs(t_[leave_row * width_ + enter]);
        }
        if (take) {
          theta = ratio;
          leave_row = r;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(static_cast<double>(theta))) {
        sol.status = LpStatus::Unbounded;
        return sol;
      }
      ++sol.iterations;
      if (theta <= tol_) {
        ++sol.degenerate_pivots;
        ++stall;
      } else {
        stall = 0;
      }

      for (std::size_t r = 0; r < m_; ++r) value_[r] -= theta * dir * t_[r * width_ + enter];
      if (leave_row == npos) {
        at_upper_[enter] = !at_upper_[enter];
        continue;
      }
      const std::size_t leaving = basis_[leave_row];
      const Real entering_value = (at_upper_[enter] ? static_cast<Real>(upper_[enter]) : Real(0)) + dir * theta;
      pivot(leave_row, enter);
      row_of[leaving] = npos;
      row_of[enter] = leave_row;
      basis_[leave_row] = enter;
      value_[leave_row] = entering_value;
      at_upper_[leaving] = leave_to_upper;
      at_upper_[enter] = false;
    }
    if (sol.status != LpStatus::Optimal) return sol;

    sol.x.assign(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      if (row_of[k] == npos && at_upper_[k]) sol.x[k] = upper_[k];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) sol.x[basis_[r]] = static_cast<double>(value_[r]);
    }
    return sol;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void pivot(std::size_t row, std::size_t col) {
    Real* prow = &t_[row * width_];
    const Real inv = Real(1) / prow[col];
    for (std::size_t k = 0; k < width_; ++k) prow[k] *= inv;
    prow[col] = Real(1);
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row) continue;
      Real* target = &t_[r * width_];
      const Real f = target[col];
      if (f == Real(0)) continue;
      eliminate(target, prow, f);
      target[col] = Real(0);
    }
    const Real f = cost_[col];
    if (f != Real(0)) {
      eliminate(cost_.data(), prow, f);
      cost_[col] = Real(0);
    }
  }

  void eliminate(Real* target, const Real* source, Real factor) {
    if constexpr (std::is_same_v<Real, double>) {
      simd::axpy_sub(std::span<double>(target, width_), std::span<const double>(source, width_), factor);
    } else {
      for (std::size_t k = 0; k < width_; ++k) target[k] -= factor * source[k];
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t width_;
  Real tol_;
  SimplexOptions opt_;
  std::vector<Real> t_;
  std::vector<Real> cost_;
  std::vector<double> upper_;
  std::vector<bool> at_upper_;
  std::vector<std::size_t> basis_;
  std::vector<Real> value_;
};

template <typename Real>
LpSolution solve_in(const LinearProgram& lp, const SimplexOptions& options) {
  Tableau<Real> tab(lp, options);
  LpSolution sol = tab.run();
  if (sol.status == LpStatus::Optimal) {
    sol.objective = 0.0;
    for (std::size_t k = 0; k < lp.cols; ++k) sol.objective += lp.c[k] * sol.x[k];
  }
  return sol;
}

}  // namespace

LpSolution solve_double(const LinearProgram& lp, const SimplexOptions& options) {
  return solve_in<double>(lp, options);
}

LpSolution solve_long_double(const LinearProgram& lp, const SimplexOptions& options) {
  return solve_in<long double>(lp, options);
}

LpSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
  const double accept = std::max(1e-7, 100.0 * options.tolerance);
  LpSolution sol = solve_double(lp, options);
  if (sol.status == LpStatus::Unbounded) return sol;
  if (sol.status == LpStatus::Optimal && max_violation(lp, sol.x) <= accept) return sol;
  sol = solve_long_double(lp, options);
  if (sol.status == LpStatus::Unbounded) return sol;
  if (sol.status != LpStatus::Optimal || max_violation(lp, sol.x) > accept) {
    throw Error(ErrorCode::NumericalFailure, "simplex failed in double and long double precision");
  }
  return sol;
}

}  // namespace mmr::lp
