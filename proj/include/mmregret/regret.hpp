#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmregret/distributions.hpp"
#include "mmregret/mechanisms.hpp"

namespace mmr {

/// Regret split by good. For Monte Carlo estimates, se is the standard error of total.
struct RegretReport {
  std::vector<double> per_good;
  double total = 0.0;
  std::optional<double> se;
  std::optional<std::size_t> n;
};

/// Full surplus minus revenue, good by good, under truthful reports.
RegretReport ex_post_regret(MechanismId mechanism, const MarketConfig& config, const ValueProfile& profile);

/// Regret of an already-computed outcome at the given (true = reported) profile.
RegretReport regret_of(const ValueProfile& profile, const Outcome& outcome);

struct ConvergencePoint {
  std::size_t n;
  double mean;
  double se;
};

struct MonteCarloOptions {
  unsigned threads = 1;
  /// Record running estimates at these sample counts (clipped to n).
  std::vector<std::size_t> checkpoints;
};

struct MonteCarloResult {
  RegretReport report;
  std::vector<ConvergencePoint> trace;
};

/// Sample mean of ex-post regret over profiles 0..n-1 of the seeded sampler.
/// Independent of the thread count: every sample has its own RNG substream and the
/// reduction runs in a fixed order after all samples are evaluated.
RegretReport expected_regret_mc(MechanismId mechanism, DistributionKind distribution, const MarketConfig& config,
                                std::size_t n, std::uint64_t seed, unsigned threads = 1);
MonteCarloResult expected_regret_mc_traced(MechanismId mechanism, DistributionKind distribution,
                                           const MarketConfig& config, std::size_t n, std::uint64_t seed,
                                           const MonteCarloOptions& options);

/// Midpoint rule over the quantile cube [0,1]^I of the worst-case distribution.
/// Requires I <= 4 and grid_size >= 64.
double expected_regret_quadrature_worst_case(MechanismId mechanism, const MarketConfig& config,
                                             std::size_t grid_size);

struct SearchOptions {
  std::size_t starts = 64;
  std::size_t golden_steps = 200;
  std::size_t passes = 3;
  unsigned threads = 1;
};

struct SearchResult {
  ValueProfile profile;
  double value = 0.0;
  /// Largest regret seen at any evaluated point (probes and refinement steps).
  double max_probe = 0.0;
  std::size_t evaluations = 0;
};

/// Random multi-start with per-coordinate golden-section refinement, maximizing
/// truthful ex-post regret over the bounds box. Deterministic given the seed.
SearchResult adversarial_profile_search(MechanismId mechanism, const MarketConfig& config, std::size_t budget,
                                        std::uint64_t seed, const SearchOptions& options = {});

/// max_i sum_j v_i^j: the most a seller of the grand bundle alone can collect at this profile.
double grand_bundle_full_info_revenue(const ValueProfile& profile);

}  // namespace mmr
