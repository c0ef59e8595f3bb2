#include "mmregret/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmregret/error.hpp"

namespace mmr {

double MarketConfig::max_bound(std::size_t good) const {
  double best = 0.0;
  for (std::size_t i = 0; i < bidders(); ++i) best = std::max(best, bounds_(i, good));
  return best;
}

MarketConfig validate_config(const Matrix& raw_bounds) {
  if (raw_bounds.empty()) throw Error(ErrorCode::EmptyMatrix, "upper-bound matrix has no entries");
  bool any_positive = false;
  for (std::size_t i = 0; i < raw_bounds.rows(); ++i) {
    for (std::size_t j = 0; j < raw_bounds.cols(); ++j) {
      const double b = raw_bounds(i, j);
      std::ostringstream where;
      where << "bound(" << i << "," << j << ") = " << b;
      if (!std::isfinite(b)) throw Error(ErrorCode::NonFinite, where.str());
      if (b < 0.0) throw Error(ErrorCode::NegativeBound, where.str());
      any_positive = any_positive || b > 0.0;
    }
  }
  if (!any_positive) throw Error(ErrorCode::AllZeroBounds, "every upper bound is zero");
  return MarketConfig(raw_bounds);
}

void validate_profile(const MarketConfig& config, const ValueProfile& profile, double slack) {
  if (profile.bidders() != config.bidders() || profile.goods() != config.goods()) {
    std::ostringstream msg;
    msg << "profile is " << profile.bidders() << "x" << profile.goods() << ", config is "
        << config.bidders() << "x" << config.goods();
    throw Error(ErrorCode::ProfileOutOfBounds, msg.str());
  }
  for (std::size_t i = 0; i < config.bidders(); ++i) {
    for (std::size_t j = 0; j < config.goods(); ++j) {
      const double v = profile(i, j);
      if (!(v >= 0.0 && v <= config.bound(i, j) + slack)) {
        std::ostringstream msg;
        msg << "value(" << i << "," << j << ") = " << v << " outside [0, " << config.bound(i, j) << "]";
        throw Error(ErrorCode::ProfileOutOfBounds, msg.str());
      }
    }
  }
}

double full_surplus(const MarketConfig& config, const ValueProfile& profile) {
  validate_profile(config, profile);
  double total = 0.0;
  for (std::size_t j = 0; j < config.goods(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < config.bidders(); ++i) best = std::max(best, profile(i, j));
    total += best;
  }
  return total;
}

double regret_cap_formula(const MarketConfig& config) {
  double total = 0.0;
  for (std::size_t j = 0; j < config.goods(); ++j) total += config.max_bound(j) / kE;
  return total;
}

MarketConfig scale_config(const MarketConfig& config, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::NonPositiveScale, "scale factor must be positive and finite");
  }
  Matrix scaled = config.bounds();
  for (double& b : scaled.data()) b *= factor;
  return validate_config(scaled);
}

Outcome::Outcome(Matrix allocations, Matrix per_good_payments)
    : allocations_(std::move(allocations)), per_good_payments_(std::move(per_good_payments)) {
  if (allocations_.rows() != per_good_payments_.rows() || allocations_.cols() != per_good_payments_.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "allocation and payment matrices differ in shape");
  }
  payments_.assign(allocations_.rows(), 0.0);
  for (std::size_t i = 0; i < allocations_.rows(); ++i) {
    for (double t : per_good_payments_.row(i)) payments_[i] += t;
  }
}

void Outcome::set(std::size_t i, std::size_t j, double q, double t) {
  allocations_(i, j) = q;
  payments_[i] += t - per_good_payments_(i, j);
  per_good_payments_(i, j) = t;
}

double Outcome::good_revenue(std::size_t j) const {
  double total = 0.0;
  for (std::size_t i = 0; i < bidders(); ++i) total += per_good_payments_(i, j);
  return total;
}

void check_outcome(const Outcome& outcome) {
  for (std::size_t j = 0; j < outcome.goods(); ++j) {
    double supply = 0.0;
    for (std::size_t i = 0; i < outcome.bidders(); ++i) {
      const double q = outcome.allocation(i, j);
      if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorCode::InfeasibleOutcome, "allocation probability outside [0,1]");
      }
      supply += q;
    }
    if (supply > 1.0 + kFeasibilityTol) throw Error(ErrorCode::InfeasibleOutcome, "good over-allocated");
  }
  for (std::size_t i = 0; i < outcome.bidders(); ++i) {
    double sum = 0.0;
    for (double t : outcome.per_good_payments().row(i)) sum += t;
    if (std::abs(sum - outcome.payment(i)) > kFeasibilityTol) {
      throw Error(ErrorCode::InfeasibleOutcome, "payment total disagrees with per-good payments");
    }
  }
}

void check_realized(const ValueProfile& report, const RealizedOutcome& outcome) {
  for (std::size_t j = 0; j < outcome.winners.size(); ++j) {
    if (!outcome.winners[j]) {
      if (outcome.prices[j] != 0.0) throw Error(ErrorCode::InfeasibleOutcome, "price charged without a sale");
    } else if (outcome.prices[j] > report(*outcome.winners[j], j)) {
      throw Error(ErrorCode::InfeasibleOutcome, "winner charged above own report");
    }
  }
}

}  // namespace mmr
