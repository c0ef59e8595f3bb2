#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "mmregret/matrix.hpp"

namespace mmr {

inline constexpr double kE = std::numbers::e;
/// Slack allowed when a sampler-produced profile is validated against its bounds.
inline constexpr double kSamplerSlack = 1e-12;
inline constexpr double kFeasibilityTol = 1e-12;

/// Known upper bounds on bidder values: entry (i, j) bounds bidder i's value for good j.
/// Immutable once constructed; the only way in is validate_config.
class MarketConfig {
 public:
  std::size_t bidders() const noexcept { return bounds_.rows(); }
  std::size_t goods() const noexcept { return bounds_.cols(); }
  double bound(std::size_t bidder, std::size_t good) const { return bounds_(bidder, good); }
  const Matrix& bounds() const noexcept { return bounds_; }

  /// max_i bound(i, good)
  double max_bound(std::size_t good) const;

  friend bool operator==(const MarketConfig&, const MarketConfig&) = default;

 private:
  explicit MarketConfig(Matrix bounds) : bounds_(std::move(bounds)) {}
  friend MarketConfig validate_config(const Matrix& raw_bounds);

  Matrix bounds_;
};

/// Realized or reported values, one row per bidder.
struct ValueProfile {
  Matrix values;

  ValueProfile() = default;
  explicit ValueProfile(Matrix v) : values(std::move(v)) {}

  std::size_t bidders() const noexcept { return values.rows(); }
  std::size_t goods() const noexcept { return values.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }

  friend bool operator==(const ValueProfile&, const ValueProfile&) = default;
};

/// Expected-form mechanism outcome: allocation probabilities and per-good payments.
class Outcome {
 public:
  Outcome() = default;
  Outcome(std::size_t bidders, std::size_t goods)
      : allocations_(bidders, goods), per_good_payments_(bidders, goods), payments_(bidders, 0.0) {}
  Outcome(Matrix allocations, Matrix per_good_payments);

  std::size_t bidders() const noexcept { return allocations_.rows(); }
  std::size_t goods() const noexcept { return allocations_.cols(); }

  double allocation(std::size_t i, std::size_t j) const { return allocations_(i, j); }
  double payment(std::size_t i, std::size_t j) const { return per_good_payments_(i, j); }
  double payment(std::size_t i) const { return payments_[i]; }

  const Matrix& allocations() const noexcept { return allocations_; }
  const Matrix& per_good_payments() const noexcept { return per_good_payments_; }
  const std::vector<double>& payments() const noexcept { return payments_; }

  void set(std::size_t i, std::size_t j, double q, double t);

  /// Revenue collected on one good.
  double good_revenue(std::size_t j) const;

  friend bool operator==(const Outcome&, const Outcome&) = default;

 private:
  Matrix allocations_;
  Matrix per_good_payments_;
  std::vector<double> payments_;
};

/// One sampled execution of a reserve-price auction.
struct RealizedOutcome {
  std::vector<std::optional<std::size_t>> winners;            // per good
  std::vector<double> prices;                                 // per good, 0 without a sale
  std::vector<std::vector<std::optional<double>>> reserves;   // [bidder][good], drawn only where relevant
};

MarketConfig validate_config(const Matrix& raw_bounds);

/// Throws Error{ProfileOutOfBounds} unless 0 <= v <= bound + slack entrywise (shape must match).
void validate_profile(const MarketConfig& config, const ValueProfile& profile, double slack = 0.0);

double full_surplus(const MarketConfig& config, const ValueProfile& profile);

/// Sum over goods of max_i bound(i, j) / e.
double regret_cap_formula(const MarketConfig& config);

MarketConfig scale_config(const MarketConfig& config, double factor);

/// Feasibility check applied to every outcome the library produces. Throws Error{InfeasibleOutcome}.
void check_outcome(const Outcome& outcome);
void check_realized(const ValueProfile& report, const RealizedOutcome& outcome);

}  // namespace mmr
