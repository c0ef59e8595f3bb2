#pragma once

#include <cstddef>
#include <vector>

#include "mmregret/market.hpp"

namespace mmr {

/// Finite-type approximation of one bidder's comonotonic equal-revenue values.
struct QuantileCell {
  double z = 0.0;               // lower end of the cell's quantile interval
  double mass = 0.0;
  std::vector<double> values;   // one per good in the bidder's selected set
};

struct QuantileDiscretization {
  std::vector<double> bounds;   // upper bounds of the bidder's selected goods
  std::vector<QuantileCell> cells;  // N continuous cells, then the atom
  std::size_t n_continuous = 0;

  std::size_t size() const noexcept { return cells.size(); }
  const QuantileCell& atom() const { return cells.back(); }
  /// Expected sum of the bidder's values under the discretized distribution.
  double expected_surplus() const;
};

/// Interim mechanism on the discretized types: allocation per cell and good, payment per cell.
struct ScreeningSolution {
  std::vector<std::vector<double>> allocation;  // [cell][good]
  std::vector<double> payment;                  // [cell]
  std::vector<double> utility;                  // [cell]
  double revenue = 0.0;
};

struct ScreeningLP {
  ScreeningSolution solution;
  std::size_t variables = 0;
  std::size_t ic_constraints_used = 0;  // incentive rows in the final LP
  std::size_t ic_constraints_total = 0; // all ordered pairs
  std::size_t rounds = 0;               // constraint-generation rounds
  std::size_t iterations = 0;           // simplex pivots over all rounds
  bool extended_precision = false;
};

/// N equal-mass continuous cells over quantiles [0, 1 - 1/e) plus the atom of mass 1/e.
/// Each continuous cell takes the inverse-quantile value at its lower end.
QuantileDiscretization build_discretization(const std::vector<double>& bounds, std::size_t n);

struct ScreeningOptions {
  /// Impose every ordered pair up front instead of adding violated pairs on demand.
  bool all_pairs = false;
};

/// Revenue-maximizing incentive-compatible, individually rational mechanism for one
/// bidder over the discretized types (all ordered-pair incentive constraints).
ScreeningLP solve_screening_lp(const QuantileDiscretization& disc, const ScreeningOptions& options = {});

/// Largest violation of the incentive and participation constraints by a solution.
double screening_violation(const QuantileDiscretization& disc, const ScreeningSolution& sol);

/// Sell everything at the bundle price sum(bounds)/e to every type.
ScreeningSolution posted_price_solution(const QuantileDiscretization& disc);

/// Best revenue among monotone threshold mechanisms (posted bundle prices at cell values).
double best_posted_bundle_revenue(const QuantileDiscretization& disc);

/// Largest violation of the two-sided envelope inequality between adjacent cells.
double envelope_gap(const QuantileDiscretization& disc, const ScreeningSolution& sol);

struct BidderCertificate {
  std::size_t bidder = 0;
  std::vector<std::size_t> goods;
  double lp_revenue = 0.0;
  double analytic_bound = 0.0;      // sum of bounds / e
  double discrete_surplus = 0.0;
  double posted_price_revenue = 0.0;
  double best_threshold_revenue = 0.0;
  double envelope_gap = 0.0;
  ScreeningLP lp;
};

struct LowerBoundCertificate {
  std::size_t n = 0;
  std::vector<BidderCertificate> bidders;
  double lp_sum = 0.0;
  double analytic_bound = 0.0;               // the regret cap
  double analytic_full_surplus = 0.0;        // 2 * cap
  double discretized_full_surplus = 0.0;
  double certified_regret_lower_bound = 0.0; // discretized surplus minus lp_sum
  double width = 0.0;                        // cap minus lower bound
  double convergence_constant = 0.0;         // c with width <= c / N guaranteed
  double observed_constant = 0.0;            // width * N
  bool lp_within_bound = false;
  bool lower_bound_within_tolerance = false;

  double tolerance() const { return convergence_constant / static_cast<double>(n); }
  bool certified() const { return lp_within_bound && lower_bound_within_tolerance; }
};

/// Solves one screening LP per selected bidder (concurrently) and assembles the
/// sandwich [certified lower bound, regret cap]. Requires N >= 50.
LowerBoundCertificate verify_lower_bound(const MarketConfig& config, std::size_t n, unsigned threads = 0);

}  // namespace mmr
