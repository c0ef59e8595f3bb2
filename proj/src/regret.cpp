#include "mmregret/regret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "mmregret/error.hpp"
#include "mmregret/rng.hpp"
#include "mmregret/simd/kernels.hpp"

namespace mmr {

namespace {

constexpr std::size_t kChunk = 8192;

double total_of(const std::vector<double>& per_good) {
  double s = 0.0;
  for (double x : per_good) s += x;
  return s;
}

struct Summary {
  double mean = 0.0;
  double se = 0.0;
};

// Two-pass mean and standard error of the mean.
Summary summarize(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const double mean = simd::moments(x).sum / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  std::vector<double> dev(x.begin(), x.end());
  for (double& d : dev) d -= mean;
  const double ss = simd::moments(dev).sum_sq;
  return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn fn) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  auto worker = [&](unsigned t) {
    for (std::size_t c = t; c < chunks; c += threads) fn(c * kChunk, std::min(n, (c + 1) * kChunk));
  };
  if (threads == 1) {
    worker(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

RegretReport regret_of(const ValueProfile& profile, const Outcome& outcome) {
  RegretReport r;
  r.per_good.resize(profile.goods());
  for (std::size_t j = 0; j < profile.goods(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < profile.bidders(); ++i) best = std::max(best, profile(i, j));
    r.per_good[j] = best - outcome.good_revenue(j);
  }
  r.total = total_of(r.per_good);
  return r;
}

RegretReport ex_post_regret(MechanismId mechanism, const MarketConfig& config, const ValueProfile& profile) {
  return regret_of(profile, evaluate(mechanism, config, profile));
}

MonteCarloResult expected_regret_mc_traced(MechanismId mechanism, DistributionKind distribution,
                                           const MarketConfig& config, std::size_t n, std::uint64_t seed,
                                           const MonteCarloOptions& options) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "need at least one sample");
  check_mechanism_shape(mechanism, config);
  const ProfileSampler sampler(distribution, config, seed);
  const std::size_t I = config.bidders();
  const std::size_t J = config.goods();

  // per_good[j * n + k], total[k]
  std::vector<double> per_good(J * n);
  std::vector<double> total(n);
  parallel_chunks(n, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> values((end - begin) * I * J);
    sampler.generate_into(begin, end, values);
    Matrix m(I, J);
    for (std::size_t k = begin; k < end; ++k) {
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>((k - begin) * I * J), I * J, m.data().begin());
      const ValueProfile profile(m);
      const RegretReport r = regret_of(profile, evaluate_unchecked(mechanism, config, profile));
      for (std::size_t j = 0; j < J; ++j) per_good[j * n + k] = r.per_good[j];
      total[k] = r.total;
    }
  });

  MonteCarloResult out;
  out.report.per_good.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    out.report.per_good[j] = summarize(std::span<const double>(per_good.data() + j * n, n)).mean;
  }
  const Summary s = summarize(total);
  out.report.total = s.mean;
  out.report.se = s.se;
  out.report.n = n;
  for (std::size_t c : options.checkpoints) {
    if (c == 0 || c > n) continue;
    const Summary partial = summarize(std::span<const double>(total.data(), c));
    out.trace.push_back({c, partial.mean, partial.se});
  }
  return out;
}

RegretReport expected_regret_mc(MechanismId mechanism, DistributionKind distribution, const MarketConfig& config,
                                std::size_t n, std::uint64_t seed, unsigned threads) {
  MonteCarloOptions opts;
  opts.threads = threads;
  return expected_regret_mc_traced(mechanism, distribution, config, n, seed, opts).report;
}

double expected_regret_quadrature_worst_case(MechanismId mechanism, const MarketConfig& config,
                                             std::size_t grid_size) {
  if (config.bidders() > 4) throw Error(ErrorCode::DimensionTooLarge, "tensor quadrature supports I <= 4");
  if (grid_size < 64) throw Error(ErrorCode::OutOfRange, "grid_size must be at least 64");
  check_mechanism_shape(mechanism, config);
  const SelectionMap sel = select_bidders(config);
  const std::size_t I = config.bidders();
  const std::size_t J = config.goods();

  // Bidders without goods are identically zero; their quantile is irrelevant.
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < I; ++i) {
    if (!sel.goods_of[i].empty()) active.push_back(i);
  }
  std::vector<double> nodes(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) nodes[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(grid_size);

  // values_at[i][j][k]: bidder i's value for good j at node k
  std::vector<std::vector<std::vector<double>>> values_at(I, std::vector<std::vector<double>>(J));
  for (std::size_t i : active) {
    for (std::size_t j : sel.goods_of[i]) {
      values_at[i][j].resize(grid_size);
      simd::er_quantile(config.bound(i, j), nodes, values_at[i][j]);
    }
  }

  const std::size_t d = active.size();
  std::vector<std::size_t> idx(d, 0);
  CompensatedSum acc;
  Matrix m(I, J);
  std::size_t points = 0;
  while (true) {
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t i = active[a];
      for (std::size_t j : sel.goods_of[i]) m(i, j) = values_at[i][j][idx[a]];
    }
    const ValueProfile profile(m);
    acc.add(regret_of(profile, evaluate_unchecked(mechanism, config, profile)).total);
    ++points;
    std::size_t a = 0;
    while (a < d && ++idx[a] == grid_size) idx[a++] = 0;
    if (a == d) break;
  }
  return acc.value() / static_cast<double>(points);
}

namespace {

class RegretObjective {
 public:
  RegretObjective(MechanismId mechanism, const MarketConfig& config) : mechanism_(mechanism), config_(config) {}

  double operator()(const Matrix& values) {
    ++evaluations;
    const ValueProfile p(values);
    const double r = regret_of(p, evaluate_unchecked(mechanism_, config_, p)).total;
    max_seen = std::max(max_seen, r);
    return r;
  }

  std::size_t evaluations = 0;
  double max_seen = -1.0;

 private:
  MechanismId mechanism_;
  const MarketConfig& config_;
};

struct Refined {
  Matrix values;
  double value;
  std::size_t evaluations;
  double max_seen;
};

Refined refine(MechanismId mechanism, const MarketConfig& config, Matrix start, const SearchOptions& opt) {
  RegretObjective f(mechanism, config);
  double current = f(start);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t pass = 0; pass < opt.passes; ++pass) {
    for (std::size_t i = 0; i < config.bidders(); ++i) {
      for (std::size_t j = 0; j < config.goods(); ++j) {
        const double hi_bound = config.bound(i, j);
        if (!(hi_bound > 0.0)) continue;
        Matrix probe = start;
        auto at = [&](double x) {
          probe(i, j) = x;
          return f(probe);
        };
        double lo = 0.0;
        double hi = hi_bound;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = at(x1);
        double f2 = at(x2);
        for (std::size_t step = 0; step < opt.golden_steps && hi - lo > 1e-15 * hi_bound; ++step) {
          if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = at(x1);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = at(x2);
          }
        }
        double best_x = start(i, j);
        double best_f = current;
        for (double x : {f1 >= f2 ? x1 : x2, 0.0, hi_bound / kE, hi_bound}) {
          const double fx = at(x);
          if (fx > best_f) {
            best_f = fx;
            best_x = x;
          }
        }
        start(i, j) = best_x;
        current = best_f;
      }
    }
  }
  return {std::move(start), current, f.evaluations, f.max_seen};
}

}  // namespace

SearchResult adversarial_profile_search(MechanismId mechanism, const MarketConfig& config, std::size_t budget,
                                        std::uint64_t seed, const SearchOptions& options) {
  if (budget < 1000) throw Error(ErrorCode::OutOfRange, "search budget must be at least 1000");
  check_mechanism_shape(mechanism, config);
  const std::size_t I = config.bidders();
  const std::size_t J = config.goods();

  // Probes: each coordinate is uniform on [0, bound] or, with probability 1/4, one of
  // the special points {0, bound/e, bound}.
  RegretObjective probe_f(mechanism, config);
  std::vector<std::pair<double, std::size_t>> scored;
  std::vector<Matrix> probes;
  probes.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    SplitMix64 gen = substream(seed, Stream::Search, k);
    Matrix m(I, J);
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t j = 0; j < J; ++j) {
        const double b = config.bound(i, j);
        const double pick = gen.uniform();
        const double u = gen.uniform();
        if (pick < 0.25) {
          const double specials[] = {0.0, b / kE, b};
          m(i, j) = specials[std::min<std::size_t>(2, static_cast<std::size_t>(u * 3.0))];
        } else {
          m(i, j) = u * b;
        }
      }
    }
    scored.emplace_back(probe_f(m), k);
    probes.push_back(std::move(m));
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const std::size_t starts = std::min(options.starts, scored.size());

  std::vector<Refined> refined(starts, Refined{Matrix(), -1.0, 0, -1.0});
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(starts)));
  auto worker = [&](unsigned t) {
    for (std::size_t s = t; s < starts; s += threads) {
      refined[s] = refine(mechanism, config, probes[scored[s].second], options);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  SearchResult result;
  result.evaluations = probe_f.evaluations;
  result.max_probe = probe_f.max_seen;
  result.profile = ValueProfile(probes[scored.front().second]);
  result.value = scored.front().first;
  for (const Refined& r : refined) {
    result.evaluations += r.evaluations;
    result.max_probe = std::max(result.max_probe, r.max_seen);
    if (r.value > result.value) {
      result.value = r.value;
      result.profile = ValueProfile(r.values);
    }
  }
  return result;
}

double grand_bundle_full_info_revenue(const ValueProfile& profile) {
  double best = 0.0;
  for (std::size_t i = 0; i < profile.bidders(); ++i) {
    const auto row = profile.values.row(i);
    best = std::max(best, std::accumulate(row.begin(), row.end(), 0.0));
  }
  return best;
}

}  // namespace mmr
