#include "mmregret/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "mmregret/error.hpp"
#include "mmregret/rng.hpp"
#include "mmregret/simd/kernels.hpp"

namespace mmr {

namespace {

Stream stream_of(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::WorstCase: return Stream::WorstCase;
    case DistributionKind::SingleBidderComonotonic: return Stream::SingleBidder;
    case DistributionKind::IidUniform: return Stream::IidUniform;
  }
  return Stream::WorstCase;
}

}  // namespace

EqualRevenueMarginal::EqualRevenueMarginal(double upper_bound) : bound_(upper_bound) {
  if (!(upper_bound > 0.0) || !std::isfinite(upper_bound)) {
    throw Error(ErrorCode::OutOfRange, "equal-revenue upper bound must be positive");
  }
}

double EqualRevenueMarginal::quantile(double z) const { return er_quantile(bound_, z); }
double EqualRevenueMarginal::cdf(double v) const { return er_cdf(bound_, v); }

double EqualRevenueMarginal::cdf_left(double v) const {
  if (v <= bound_ / kE) return 0.0;
  if (v <= bound_) return 1.0 - bound_ / (kE * v);
  return 1.0;
}

double er_quantile(double upper_bound, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw Error(ErrorCode::OutOfRange, "quantile outside [0,1]");
  if (!(upper_bound > 0.0)) throw Error(ErrorCode::OutOfRange, "upper bound must be positive");
  double out = 0.0;
  simd::er_quantile(upper_bound, std::span<const double>(&z, 1), std::span<double>(&out, 1));
  return out;
}

double er_cdf(double upper_bound, double v) {
  if (!(upper_bound > 0.0)) throw Error(ErrorCode::OutOfRange, "upper bound must be positive");
  double out = 0.0;
  simd::er_cdf(upper_bound, std::span<const double>(&v, 1), std::span<double>(&out, 1));
  return out;
}

SelectionMap select_bidders(const MarketConfig& config) {
  SelectionMap sel;
  sel.picked.assign(config.goods(), std::nullopt);
  sel.goods_of.assign(config.bidders(), {});
  for (std::size_t j = 0; j < config.goods(); ++j) {
    const double top = config.max_bound(j);
    if (!(top > 0.0)) continue;
    for (std::size_t i = 0; i < config.bidders(); ++i) {
      if (config.bound(i, j) == top) {
        sel.picked[j] = i;
        sel.goods_of[i].push_back(j);
        break;
      }
    }
  }
  return sel;
}

std::size_t richest_bidder(const MarketConfig& config) {
  std::size_t best = 0;
  double best_sum = -1.0;
  for (std::size_t i = 0; i < config.bidders(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < config.goods(); ++j) s += config.bound(i, j);
    if (s > best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return best;
}

ValueProfile worst_case_profile(const MarketConfig& config, const SelectionMap& selection,
                                const QuantileVector& quantiles) {
  if (quantiles.z.size() != config.bidders()) throw Error(ErrorCode::ShapeMismatch, "need one quantile per bidder");
  Matrix values(config.bidders(), config.goods());
  for (std::size_t i = 0; i < config.bidders(); ++i) {
    for (std::size_t j : selection.goods_of[i]) values(i, j) = er_quantile(config.bound(i, j), quantiles.z[i]);
  }
  return ValueProfile(std::move(values));
}

std::string_view tag(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::WorstCase: return "worst_case";
    case DistributionKind::SingleBidderComonotonic: return "single_bidder_comonotonic";
    case DistributionKind::IidUniform: return "iid_uniform";
  }
  return "unknown";
}

std::optional<DistributionKind> parse_distribution(std::string_view name) {
  for (auto k : {DistributionKind::WorstCase, DistributionKind::SingleBidderComonotonic,
                 DistributionKind::IidUniform}) {
    if (tag(k) == name) return k;
  }
  return std::nullopt;
}

ProfileSampler::ProfileSampler(DistributionKind kind, MarketConfig config, std::uint64_t seed)
    : kind_(kind), config_(std::move(config)), seed_(seed), selection_(select_bidders(config_)),
      single_bidder_(richest_bidder(config_)) {}

ValueProfile ProfileSampler::sample(std::uint64_t index) const {
  const std::size_t cells = config_.bidders() * config_.goods();
  std::vector<double> buf(cells);
  generate_into(index, index + 1, buf);
  Matrix m(config_.bidders(), config_.goods());
  std::copy(buf.begin(), buf.end(), m.data().begin());
  return ValueProfile(std::move(m));
}

std::vector<ValueProfile> ProfileSampler::generate(std::uint64_t begin, std::uint64_t end) const {
  const std::size_t I = config_.bidders();
  const std::size_t J = config_.goods();
  std::vector<double> buf((end - begin) * I * J);
  generate_into(begin, end, buf);
  std::vector<ValueProfile> out;
  out.reserve(end - begin);
  for (std::uint64_t k = 0; k < end - begin; ++k) {
    Matrix m(I, J);
    std::copy_n(buf.begin() + static_cast<std::ptrdiff_t>(k * I * J), I * J, m.data().begin());
    out.emplace_back(std::move(m));
  }
  return out;
}

void ProfileSampler::generate_into(std::uint64_t begin, std::uint64_t end, std::span<double> values) const {
  const std::size_t I = config_.bidders();
  const std::size_t J = config_.goods();
  const std::size_t n = end - begin;
  if (values.size() != n * I * J) throw Error(ErrorCode::ShapeMismatch, "output buffer has the wrong size");
  std::fill(values.begin(), values.end(), 0.0);

  // Draw order per sample: one uniform per bidder (quantile samplers) or per cell (iid).
  if (kind_ == DistributionKind::IidUniform) {
    for (std::size_t k = 0; k < n; ++k) {
      SplitMix64 gen = substream(seed_, stream_of(kind_), begin + k);
      for (std::size_t c = 0; c < I * J; ++c) values[k * I * J + c] = gen.uniform() * config_.bounds().data()[c];
    }
    return;
  }

  // z[i * n + k]: quantile of bidder i in sample k.
  std::vector<double> z(I * n);
  for (std::size_t k = 0; k < n; ++k) {
    SplitMix64 gen = substream(seed_, stream_of(kind_), begin + k);
    for (std::size_t i = 0; i < I; ++i) z[i * n + k] = gen.uniform();
  }
  std::vector<double> column(n);
  auto fill = [&](std::size_t i, std::size_t j) {
    simd::er_quantile(config_.bound(i, j), std::span<const double>(z.data() + i * n, n), column);
    for (std::size_t k = 0; k < n; ++k) values[k * I * J + i * J + j] = column[k];
  };
  if (kind_ == DistributionKind::WorstCase) {
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t j : selection_.goods_of[i]) fill(i, j);
    }
  } else {
    for (std::size_t j = 0; j < J; ++j) {
      if (config_.bound(single_bidder_, j) > 0.0) fill(single_bidder_, j);
    }
  }
}

std::vector<ValueProfile> sample_worst_case(const MarketConfig& config, const SelectionMap& selection,
                                            std::size_t n, std::uint64_t seed) {
  ProfileSampler sampler(DistributionKind::WorstCase, config, seed);
  if (selection.picked != sampler.selection().picked) {
    // Caller supplied a different tie-break; honour it.
    std::vector<ValueProfile> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      SplitMix64 gen = substream(seed, Stream::WorstCase, k);
      QuantileVector q{std::vector<double>(config.bidders())};
      for (double& z : q.z) z = gen.uniform();
      out.push_back(worst_case_profile(config, selection, q));
    }
    return out;
  }
  return sampler.generate(0, n);
}

std::vector<ValueProfile> sample_single_bidder_comonotonic(const MarketConfig& config, std::size_t n,
                                                           std::uint64_t seed) {
  return ProfileSampler(DistributionKind::SingleBidderComonotonic, config, seed).generate(0, n);
}

std::vector<ValueProfile> sample_iid_uniform(const MarketConfig& config, std::size_t n, std::uint64_t seed) {
  return ProfileSampler(DistributionKind::IidUniform, config, seed).generate(0, n);
}

}  // namespace mmr
