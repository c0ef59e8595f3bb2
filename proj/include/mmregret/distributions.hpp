#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmregret/market.hpp"

namespace mmr {

/// For each good, the single bidder nature keeps; every other bidder values it at zero.
struct SelectionMap {
  std::vector<std::optional<std::size_t>> picked;   // per good; empty for an all-zero column
  std::vector<std::vector<std::size_t>> goods_of;   // per bidder, ascending
};

/// Equal-revenue marginal on [bound/e, bound] with an atom of mass 1/e at bound.
class EqualRevenueMarginal {
 public:
  explicit EqualRevenueMarginal(double upper_bound);

  double upper_bound() const noexcept { return bound_; }
  double quantile(double z) const;
  double cdf(double v) const;
  /// Left limit F(v-).
  double cdf_left(double v) const;
  double mean() const noexcept { return 2.0 * bound_ / kE; }

 private:
  double bound_;
};

/// Quantiles z_i in [0,1], one per bidder.
struct QuantileVector {
  std::vector<double> z;
};

SelectionMap select_bidders(const MarketConfig& config);

double er_quantile(double upper_bound, double z);
double er_cdf(double upper_bound, double v);

/// The worst-case profile for given per-bidder quantiles: comonotonic equal-revenue
/// values on the bidder's selected goods, zeros elsewhere.
ValueProfile worst_case_profile(const MarketConfig& config, const SelectionMap& selection,
                                const QuantileVector& quantiles);

enum class DistributionKind { WorstCase, SingleBidderComonotonic, IidUniform };

std::string_view tag(DistributionKind kind);
std::optional<DistributionKind> parse_distribution(std::string_view name);

/// Seeded, index-addressable profile generator. sample(k) depends only on (seed, k),
/// so generate() over any chunking reproduces the serial output bit for bit.
class ProfileSampler {
 public:
  ProfileSampler(DistributionKind kind, MarketConfig config, std::uint64_t seed);

  DistributionKind kind() const noexcept { return kind_; }
  const MarketConfig& config() const noexcept { return config_; }
  const SelectionMap& selection() const noexcept { return selection_; }
  /// Row kept by the single-bidder comonotonic distribution.
  std::size_t single_bidder() const noexcept { return single_bidder_; }

  ValueProfile sample(std::uint64_t index) const;
  std::vector<ValueProfile> generate(std::uint64_t begin, std::uint64_t end) const;

  /// Fills values[(k - begin) * I * J + i * J + j] for k in [begin, end): batched path
  /// using the vector kernels.
  void generate_into(std::uint64_t begin, std::uint64_t end, std::span<double> values) const;

 private:
  DistributionKind kind_;
  MarketConfig config_;
  std::uint64_t seed_;
  SelectionMap selection_;
  std::size_t single_bidder_ = 0;
};

std::vector<ValueProfile> sample_worst_case(const MarketConfig& config, const SelectionMap& selection,
                                            std::size_t n, std::uint64_t seed);
std::vector<ValueProfile> sample_single_bidder_comonotonic(const MarketConfig& config, std::size_t n,
                                                           std::uint64_t seed);
std::vector<ValueProfile> sample_iid_uniform(const MarketConfig& config, std::size_t n, std::uint64_t seed);

/// argmax_i sum_j bound(i, j), lowest index on ties.
std::size_t richest_bidder(const MarketConfig& config);

}  // namespace mmr
