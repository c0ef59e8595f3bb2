#include "mmregret/mechanisms.hpp"

#include <algorithm>
#include <cmath>

#include "mmregret/error.hpp"
#include "mmregret/rng.hpp"

namespace mmr {

namespace {

struct TopTwo {
  double top = -1.0;
  std::size_t count = 0;  // bidders reporting `top`
  std::size_t first = 0;  // lowest index reporting `top`
  double second = 0.0;    // highest report strictly below `top` (0 if none)
};

TopTwo top_two(std::span<const double> reports) {
  TopTwo tt;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double v = reports[i];
    if (v > tt.top) {
      if (tt.count > 0) tt.second = std::max(tt.second, tt.top);
      tt.top = v;
      tt.count = 1;
      tt.first = i;
    } else if (v == tt.top) {
      ++tt.count;
    } else {
      tt.second = std::max(tt.second, v);
    }
  }
  return tt;
}

// 1 + ln(v / scale), clamped into [0, 1] against rounding at the endpoints.
double log_allocation(double v, double scale) {
  return std::clamp(1.0 + std::log(v / scale), 0.0, 1.0);
}

// Winner among tied top reporters: lowest bound among those clearing their own
// reserve floor, lowest index on equal bounds.
std::optional<std::size_t> ssprr_tie_winner(std::span<const double> bounds, std::span<const double> reports,
                                            double top) {
  std::optional<std::size_t> winner;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    if (reports[s] != top || !(bounds[s] > 0.0) || reports[s] < bounds[s] / kE) continue;
    if (!winner || bounds[s] < bounds[*winner]) winner = s;
  }
  return winner;
}

// Bidder whose reserve decides the sale, with the price floor set by competitors.
struct Candidate {
  std::size_t bidder;
  double competing;
};

std::optional<Candidate> ssprr_candidate(std::span<const double> bounds, std::span<const double> reports) {
  const TopTwo tt = top_two(reports);
  if (tt.count == 1) {
    if (!(bounds[tt.first] > 0.0)) return std::nullopt;
    return Candidate{tt.first, tt.second};
  }
  if (auto w = ssprr_tie_winner(bounds, reports, tt.top)) return Candidate{*w, tt.top};
  return std::nullopt;
}

void require_shape(const MarketConfig& config, const ValueProfile& report) {
  validate_profile(config, report);
}

template <typename GoodRule>
Outcome separate_outcome(const MarketConfig& config, const ValueProfile& report, GoodRule rule) {
  Outcome out(config.bidders(), config.goods());
  std::vector<double> bounds(config.bidders());
  std::vector<double> reports(config.bidders());
  for (std::size_t j = 0; j < config.goods(); ++j) {
    for (std::size_t i = 0; i < config.bidders(); ++i) {
      bounds[i] = config.bound(i, j);
      reports[i] = report(i, j);
    }
    const GoodOutcome g = rule(bounds, reports);
    if (g.winner) out.set(*g.winner, j, g.allocation, g.payment);
  }
  return out;
}

Outcome grand_bundle_unchecked(const MarketConfig& config, const ValueProfile& report) {
  Outcome out(1, config.goods());
  double bid = 0.0;
  double total_bound = 0.0;
  for (std::size_t j = 0; j < config.goods(); ++j) {
    bid += report(0, j);
    total_bound += config.bound(0, j);
  }
  if (!(bid > total_bound / kE)) return out;
  const double q = log_allocation(bid, total_bound);
  const double price = bid - total_bound / kE;
  // Payment attributed to goods in proportion to the reported values.
  for (std::size_t j = 0; j < config.goods(); ++j) out.set(0, j, q, price * (report(0, j) / bid));
  return out;
}

}  // namespace

std::string_view tag(MechanismId id) {
  switch (id) {
    case MechanismId::Ssprr: return "ssprr";
    case MechanismId::AnonymousSsprr: return "anonymous";
    case MechanismId::GrandBundle1B: return "bundle1b";
    case MechanismId::DigitalGoods: return "digital";
    case MechanismId::PostedSeparate1B: return "posted1b";
  }
  return "unknown";
}

std::optional<MechanismId> parse_mechanism(std::string_view name) {
  for (MechanismId id : kAllMechanisms) {
    if (tag(id) == name) return id;
  }
  return std::nullopt;
}

bool is_good_separable(MechanismId id) { return id != MechanismId::GrandBundle1B; }

void check_mechanism_shape(MechanismId id, const MarketConfig& config) {
  switch (id) {
    case MechanismId::GrandBundle1B:
    case MechanismId::PostedSeparate1B:
      if (config.bidders() != 1) throw Error(ErrorCode::NotSingleBidder, std::string(tag(id)) + " requires I = 1");
      break;
    case MechanismId::DigitalGoods:
      if (config.bidders() != config.goods()) {
        throw Error(ErrorCode::MechanismShapeMismatch, "digital goods need an I x I market (one good per bidder)");
      }
      for (std::size_t i = 0; i < config.bidders(); ++i) {
        for (std::size_t j = 0; j < config.goods(); ++j) {
          if (i != j && config.bound(i, j) != 0.0) {
            throw Error(ErrorCode::MechanismShapeMismatch, "digital goods need zero off-diagonal bounds");
          }
        }
      }
      break;
    case MechanismId::Ssprr:
    case MechanismId::AnonymousSsprr:
      break;
  }
}

GoodOutcome ssprr_good(std::span<const double> bounds, std::span<const double> reports) {
  const TopTwo tt = top_two(reports);
  if (tt.count == 1) {
    const std::size_t i = tt.first;
    const double b = bounds[i];
    const double v = tt.top;
    if (!(b > 0.0) || v < b / kE) return {};
    const double v2 = tt.second;
    const double t = v2 < b / kE ? v - b / kE : v + v2 * std::log(v2 / b);
    return {i, log_allocation(v, b), t};
  }
  const auto w = ssprr_tie_winner(bounds, reports, tt.top);
  if (!w) return {};
  const double b = bounds[*w];
  const double v = tt.top;
  return {*w, log_allocation(v, b), v + v * std::log(v / b)};
}

GoodOutcome anonymous_good(std::span<const double> bounds, std::span<const double> reports) {
  const double top_bound = *std::max_element(bounds.begin(), bounds.end());
  if (!(top_bound > 0.0)) return {};
  const double floor = top_bound / kE;
  const TopTwo tt = top_two(reports);
  const double v = tt.top;
  if (v < floor) return {};
  if (tt.count == 1) {
    const double v2 = tt.second;
    const double t = v2 < floor ? v - floor : v + v2 * std::log(v2 / top_bound);
    return {tt.first, log_allocation(v, top_bound), t};
  }
  return {tt.first, log_allocation(v, top_bound), v + v * std::log(v / top_bound)};
}

Outcome ssprr_expected_outcome(const MarketConfig& config, const ValueProfile& report) {
  require_shape(config, report);
  Outcome out = separate_outcome(config, report, ssprr_good);
  check_outcome(out);
  return out;
}

Outcome anonymous_ssprr_expected_outcome(const MarketConfig& config, const ValueProfile& report) {
  require_shape(config, report);
  Outcome out = separate_outcome(config, report, anonymous_good);
  check_outcome(out);
  return out;
}

Outcome grand_bundle_outcome_1b(const MarketConfig& config, const ValueProfile& report) {
  check_mechanism_shape(MechanismId::GrandBundle1B, config);
  require_shape(config, report);
  Outcome out = grand_bundle_unchecked(config, report);
  check_outcome(out);
  return out;
}

Outcome posted_separate_outcome_1b(const MarketConfig& config, const ValueProfile& report) {
  check_mechanism_shape(MechanismId::PostedSeparate1B, config);
  return ssprr_expected_outcome(config, report);
}

MarketConfig digital_goods_config(std::span<const double> bounds) {
  Matrix m(bounds.size(), bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) m(i, i) = bounds[i];
  return validate_config(m);
}

ValueProfile digital_goods_profile(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return ValueProfile(std::move(m));
}

Outcome digital_goods_outcome(std::span<const double> bounds, std::span<const double> report) {
  if (bounds.size() != report.size() || bounds.empty()) {
    throw Error(ErrorCode::OutOfRange, "digital goods bounds and report must have equal, positive length");
  }
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(report[i] >= 0.0 && report[i] <= bounds[i])) {
      throw Error(ErrorCode::OutOfRange, "digital goods report outside [0, bound]");
    }
  }
  Outcome out(bounds.size(), bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double b = bounds[i];
    const double v = report[i];
    if (b > 0.0 && v >= b / kE) out.set(i, i, log_allocation(v, b), v - b / kE);
  }
  check_outcome(out);
  return out;
}

double ssprr_reserve(double bound, double u) { return std::min(bound, (bound / kE) * std::exp(u)); }

RealizedOutcome ssprr_realize(const MarketConfig& config, const ValueProfile& report,
                              std::span<const double> uniforms) {
  require_shape(config, report);
  if (uniforms.size() != config.goods()) throw Error(ErrorCode::ShapeMismatch, "need one uniform per good");
  RealizedOutcome out;
  out.winners.assign(config.goods(), std::nullopt);
  out.prices.assign(config.goods(), 0.0);
  out.reserves.assign(config.bidders(), std::vector<std::optional<double>>(config.goods()));
  std::vector<double> bounds(config.bidders());
  std::vector<double> reports(config.bidders());
  for (std::size_t j = 0; j < config.goods(); ++j) {
    for (std::size_t i = 0; i < config.bidders(); ++i) {
      bounds[i] = config.bound(i, j);
      reports[i] = report(i, j);
    }
    const auto cand = ssprr_candidate(bounds, reports);
    if (!cand) continue;
    const double reserve = ssprr_reserve(bounds[cand->bidder], uniforms[j]);
    out.reserves[cand->bidder][j] = reserve;
    if (reports[cand->bidder] >= reserve) {
      out.winners[j] = cand->bidder;
      out.prices[j] = std::max(cand->competing, reserve);
    }
  }
  check_realized(report, out);
  return out;
}

RealizedOutcome ssprr_sampled_outcome(const MarketConfig& config, const ValueProfile& report,
                                      std::uint64_t seed) {
  SplitMix64 gen = substream(seed, Stream::Reserve, 0);
  std::vector<double> u(config.goods());
  for (double& x : u) x = gen.uniform();
  return ssprr_realize(config, report, u);
}

Outcome evaluate_unchecked(MechanismId id, const MarketConfig& config, const ValueProfile& report) {
  switch (id) {
    case MechanismId::Ssprr:
    case MechanismId::PostedSeparate1B:
    case MechanismId::DigitalGoods:
      return separate_outcome(config, report, ssprr_good);
    case MechanismId::AnonymousSsprr:
      return separate_outcome(config, report, anonymous_good);
    case MechanismId::GrandBundle1B:
      return grand_bundle_unchecked(config, report);
  }
  return Outcome(config.bidders(), config.goods());
}

Outcome evaluate(MechanismId id, const MarketConfig& config, const ValueProfile& report) {
  check_mechanism_shape(id, config);
  require_shape(config, report);
  if (id == MechanismId::DigitalGoods) {
    std::vector<double> b(config.bidders());
    std::vector<double> v(config.bidders());
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = config.bound(i, i);
      v[i] = report(i, i);
    }
    return digital_goods_outcome(b, v);
  }
  Outcome out = evaluate_unchecked(id, config, report);
  check_outcome(out);
  return out;
}

GoodOutcome evaluate_good(MechanismId id, std::span<const double> bounds, std::span<const double> reports) {
  if (id == MechanismId::AnonymousSsprr) return anonymous_good(bounds, reports);
  if (id == MechanismId::GrandBundle1B) throw Error(ErrorCode::MechanismShapeMismatch, "bundling is not separable");
  return ssprr_good(bounds, reports);
}

}  // namespace mmr
