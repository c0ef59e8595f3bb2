#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmregret/market.hpp"

namespace mmr {

enum class MechanismId {
  Ssprr,             ///< separate second-price auction, bidder-specific random reserves
  AnonymousSsprr,    ///< same auction with reserves scaled by the good's largest bound
  GrandBundle1B,     ///< randomized grand bundling, single bidder
  DigitalGoods,      ///< per-bidder randomized posted price, unlimited supply
  PostedSeparate1B,  ///< separate randomized posted prices, single bidder
};

inline constexpr MechanismId kAllMechanisms[] = {MechanismId::Ssprr, MechanismId::AnonymousSsprr,
                                                 MechanismId::GrandBundle1B, MechanismId::DigitalGoods,
                                                 MechanismId::PostedSeparate1B};

/// CLI tag: "ssprr", "anonymous", "bundle1b", "digital", "posted1b".
std::string_view tag(MechanismId id);
std::optional<MechanismId> parse_mechanism(std::string_view tag);

/// True when good j's allocations and payments depend only on column j of the report.
bool is_good_separable(MechanismId id);

/// Throws NotSingleBidder / MechanismShapeMismatch if the mechanism cannot run on this config.
void check_mechanism_shape(MechanismId id, const MarketConfig& config);

/// Outcome of one good's auction in expected form.
struct GoodOutcome {
  std::optional<std::size_t> winner;
  double allocation = 0.0;
  double payment = 0.0;
};

// Single-good rules on one column of bounds and reports. No validation.
GoodOutcome ssprr_good(std::span<const double> bounds, std::span<const double> reports);
GoodOutcome anonymous_good(std::span<const double> bounds, std::span<const double> reports);

Outcome ssprr_expected_outcome(const MarketConfig& config, const ValueProfile& report);
Outcome anonymous_ssprr_expected_outcome(const MarketConfig& config, const ValueProfile& report);
Outcome grand_bundle_outcome_1b(const MarketConfig& config, const ValueProfile& report);
Outcome posted_separate_outcome_1b(const MarketConfig& config, const ValueProfile& report);

/// Digital goods as I goods on an I x I market where bidder i only values good i.
Outcome digital_goods_outcome(std::span<const double> bounds, std::span<const double> report);
MarketConfig digital_goods_config(std::span<const double> bounds);
ValueProfile digital_goods_profile(std::span<const double> values);

/// Reserve drawn by inverse CDF of G(r) = 1 + ln(r / bound) on [bound/e, bound].
double ssprr_reserve(double bound, double u);

/// One execution of the reserve auction with the given uniform draw per good.
RealizedOutcome ssprr_realize(const MarketConfig& config, const ValueProfile& report,
                              std::span<const double> uniforms);
RealizedOutcome ssprr_sampled_outcome(const MarketConfig& config, const ValueProfile& report,
                                      std::uint64_t seed);

/// Dispatches to the mechanism after validating the report and the config shape.
Outcome evaluate(MechanismId id, const MarketConfig& config, const ValueProfile& report);

/// Same as evaluate without validation; used in hot loops over pre-validated grids.
Outcome evaluate_unchecked(MechanismId id, const MarketConfig& config, const ValueProfile& report);

/// Expected outcome of good j alone. Only meaningful for good-separable mechanisms.
GoodOutcome evaluate_good(MechanismId id, std::span<const double> bounds, std::span<const double> reports);

}  // namespace mmr
