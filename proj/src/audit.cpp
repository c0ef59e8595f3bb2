#include "mmregret/audit.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <limits>
#include <future>
#include <numeric>
#include <thread>

#include "mmregret/error.hpp"
#include "mmregret/regret.hpp"

namespace mmr {

namespace {

constexpr double kParticipationTol = 1e-12;
constexpr double kEquivalenceTol = 1e-12;
constexpr std::size_t kAutoCrossCheck = 300'000;

// Mixed-radix counter over a product of axes, last digit fastest.
class Odometer {
 public:
  explicit Odometer(std::vector<std::size_t> radix) : radix_(std::move(radix)), digit_(radix_.size(), 0) {}
  const std::vector<std::size_t>& digits() const { return digit_; }
  bool next() {
    for (std::size_t k = digit_.size(); k-- > 0;) {
      if (++digit_[k] < radix_[k]) return true;
      digit_[k] = 0;
    }
    return false;
  }

 private:
  std::vector<std::size_t> radix_;
  std::vector<std::size_t> digit_;
};

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

std::size_t product(const std::vector<std::size_t>& sizes) {
  std::size_t p = 1;
  for (std::size_t s : sizes) {
    if (s != 0 && p > std::numeric_limits<std::size_t>::max() / s) return std::numeric_limits<std::size_t>::max();
    p *= s;
  }
  return p;
}

bool violation_less(const AuditViolation& x, const AuditViolation& y) {
  if (x.good != y.good) return x.good < y.good;
  if (x.profile != y.profile) return x.profile < y.profile;
  if (x.bidder != y.bidder) return x.bidder < y.bidder;
  return x.deviation < y.deviation;
}

// Keeps only the lexicographically smallest kMaxListed entries without unbounded growth.
void trim(std::vector<AuditViolation>& list) {
  if (list.size() <= 4 * kMaxListed) return;
  std::sort(list.begin(), list.end(), violation_less);
  list.resize(kMaxListed);
}

struct Partial {
  std::vector<AuditViolation> violations;
  std::size_t count = 0;
  std::size_t checks = 0;
  double max_gain = 0.0;
  bool zero_exact = true;
};

void record(Partial& p, AuditViolation v) {
  ++p.count;
  p.violations.push_back(std::move(v));
  trim(p.violations);
}

void finish(AuditReport& report, std::vector<Partial>& parts) {
  for (auto& p : parts) {
    report.violation_count += p.count;
    report.checks += p.checks;
    report.zero_report_exact = report.zero_report_exact && p.zero_exact;
    for (auto& v : p.violations) report.violations.push_back(std::move(v));
  }
  std::sort(report.violations.begin(), report.violations.end(), violation_less);
  if (report.violations.size() > kMaxListed) report.violations.resize(kMaxListed);
}

// Runs jobs on up to `threads` workers; results keep the job order.
template <class Job>
std::vector<Partial> run_jobs(std::size_t count, unsigned threads, Job job) {
  std::vector<Partial> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = job(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < count;) out[k] = job(k);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

std::vector<double> column_bounds(const MarketConfig& config, std::size_t j) {
  std::vector<double> b(config.bidders());
  for (std::size_t i = 0; i < config.bidders(); ++i) b[i] = config.bound(i, j);
  return b;
}

// All grid points of every (bidder, good) cell, flattened row-major.
std::vector<std::vector<double>> cell_axes(const MarketConfig& config, const DeviationGrid& grid) {
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < config.bidders(); ++i)
    for (std::size_t j = 0; j < config.goods(); ++j) axes.push_back(grid.axis(config.bound(i, j)));
  return axes;
}

std::vector<std::size_t> sizes_of(const std::vector<std::vector<double>>& axes) {
  std::vector<std::size_t> s;
  for (const auto& a : axes) s.push_back(a.size());
  return s;
}

ValueProfile profile_at(const MarketConfig& config, const std::vector<std::vector<double>>& axes,
                        const std::vector<std::size_t>& digits) {
  Matrix m(config.bidders(), config.goods());
  for (std::size_t k = 0; k < digits.size(); ++k) m.data()[k] = axes[k][digits[k]];
  return ValueProfile{m};
}

double utility(const ValueProfile& truth, const Outcome& out, std::size_t i) {
  double u = -out.payment(i);
  for (std::size_t j = 0; j < truth.values.cols(); ++j) u += truth.values(i, j) * out.allocation(i, j);
  return u;
}

// Bidder i's share of one good's outcome.
std::pair<double, double> share(const GoodOutcome& g, std::size_t i) {
  if (g.winner && *g.winner == i) return {g.allocation, g.payment};
  return {0.0, 0.0};
}

// Per-good DSIC for bidder i on good j. Deviant outcomes depend only on the opponents and
// the report, so they are computed once per (opponents, report) and reused for every true value.
Partial dsic_good(MechanismId mech, const MarketConfig& config, const DeviationGrid& grid, std::size_t j,
                  std::size_t i, double& max_gain_out) {
  const std::vector<double> bounds = column_bounds(config, j);
  std::vector<std::vector<double>> axes;
  for (double b : bounds) axes.push_back(grid.axis(b));
  std::vector<std::size_t> radix;
  for (std::size_t k = 0; k < bounds.size(); ++k) radix.push_back(k == i ? 1 : axes[k].size());

  const auto& own = axes[i];
  std::vector<double> q(own.size()), t(own.size());
  std::vector<double> col(bounds.size());
  Partial p;
  Odometer opp(radix);
  do {
    for (std::size_t k = 0; k < bounds.size(); ++k)
      if (k != i) col[k] = axes[k][opp.digits()[k]];
    for (std::size_t d = 0; d < own.size(); ++d) {
      col[i] = own[d];
      std::tie(q[d], t[d]) = share(evaluate_good(mech, bounds, col), i);
    }
    for (std::size_t a = 0; a < own.size(); ++a) {
      const double v = own[a];
      const double truthful = v * q[a] - t[a];
      for (std::size_t d = 0; d < own.size(); ++d) {
        const double gain = v * q[d] - t[d] - truthful;
        p.max_gain = std::max(p.max_gain, gain);
        if (gain > grid.tolerance) {
          col[i] = v;
          record(p, AuditViolation{j, i, col, {own[d]}, truthful, truthful + gain, gain});
        }
      }
    }
    p.checks += own.size() * own.size();
  } while (opp.next());
  max_gain_out = p.max_gain;
  return p;
}

// Upper envelope of lines y = slope * x + intercept, for max queries.
class UpperEnvelope {
 public:
  struct Line {
    double slope, intercept;
    std::size_t tag;
  };
  explicit UpperEnvelope(std::vector<Line> lines) {
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
      if (a.slope != b.slope) return a.slope < b.slope;
      if (a.intercept != b.intercept) return a.intercept > b.intercept;
      return a.tag < b.tag;
    });
    for (const Line& l : lines) {
      if (!hull_.empty() && hull_.back().slope == l.slope) continue;  // dominated by the earlier one
      while (hull_.size() >= 2 && redundant(hull_[hull_.size() - 2], hull_.back(), l)) hull_.pop_back();
      hull_.push_back(l);
    }
  }
  const Line& best(double x) const {
    std::size_t lo = 0, hi = hull_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (value(hull_[mid], x) <= value(hull_[mid + 1], x)) lo = mid + 1;
      else hi = mid;
    }
    return hull_[lo];
  }
  static double value(const Line& l, double x) { return l.slope * x + l.intercept; }

 private:
  static bool redundant(const Line& a, const Line& b, const Line& c) {
    // b never strictly above both a and c
    return (c.intercept - a.intercept) * (b.slope - a.slope) >= (b.intercept - a.intercept) * (c.slope - a.slope);
  }
  std::vector<Line> hull_;
};

// Single-bidder bundling: utility of true values v under report r is sum(v) q(r) - T(r),
// so the whole deviation set is a family of lines in sum(v).
Partial dsic_bundle(const MarketConfig& config, const DeviationGrid& grid) {
  const auto axes = cell_axes(config, grid);
  std::vector<ValueProfile> profiles;
  std::vector<double> sums, q, t;
  Odometer od(sizes_of(axes));
  do {
    profiles.push_back(profile_at(config, axes, od.digits()));
    const Outcome o = grand_bundle_outcome_1b(config, profiles.back());
    const auto& row = profiles.back().values;
    double s = 0.0;
    for (std::size_t j = 0; j < row.cols(); ++j) s += row(0, j);
    sums.push_back(s);
    q.push_back(o.allocation(0, 0));
    t.push_back(o.payment(0));
  } while (od.next());

  std::vector<UpperEnvelope::Line> lines;
  for (std::size_t k = 0; k < profiles.size(); ++k) lines.push_back({q[k], -t[k], k});
  const UpperEnvelope env(std::move(lines));

  Partial p;
  p.checks = profiles.size() * profiles.size();
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const double truthful = sums[k] * q[k] - t[k];
    const auto& line = env.best(sums[k]);
    const double gain = UpperEnvelope::value(line, sums[k]) - truthful;
    p.max_gain = std::max(p.max_gain, gain);
    if (gain > grid.tolerance) {
      const auto& dev = profiles[line.tag].values;
      record(p, AuditViolation{std::nullopt, 0, to_vec(profiles[k].values.row(0)), to_vec(dev.row(0)), truthful,
                               truthful + gain, gain});
    }
  }
  return p;
}

unsigned resolve_threads(unsigned threads) {
  return threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
}

}  // namespace

std::string to_string(AuditKind kind) {
  return kind == AuditKind::Dsic ? "dsic" : "participation_security";
}

std::vector<double> DeviationGrid::axis(double bound) const {
  if (points < 2) throw Error(ErrorCode::OutOfRange, "deviation grid needs at least 2 points");
  std::vector<double> out;
  out.reserve(points + 2);
  const double g = static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double x = static_cast<double>(k);
    out.push_back(includes_boundary ? (k + 1 == points ? bound : bound * x / (g - 1.0)) : bound * (x + 0.5) / g);
  }
  if (!includes_boundary) out.push_back(0.0);  // the zero report is always a deviation
  out.push_back(bound / kE);
  out.push_back(bound);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AuditReport verify_dsic_full(MechanismId mech, const MarketConfig& config, const DeviationGrid& grid,
                             std::size_t max_evaluations) {
  check_mechanism_shape(mech, config);
  const auto axes = cell_axes(config, grid);
  const std::size_t profiles = product(sizes_of(axes));
  std::size_t deviations = 0;
  const std::size_t goods = config.goods();
  for (std::size_t i = 0; i < config.bidders(); ++i) {
    std::vector<std::size_t> row;
    for (std::size_t j = 0; j < goods; ++j) row.push_back(axes[i * goods + j].size());
    deviations += product(row);
  }
  if (profiles > max_evaluations / std::max<std::size_t>(1, deviations)) {
    throw Error(ErrorCode::DimensionTooLarge, "full-vector audit grid too large");
  }

  AuditReport report;
  report.kind = AuditKind::Dsic;
  report.mechanism = mech;
  report.decomposition = "full";
  report.grid_resolution = grid.points;
  Partial p;
  Odometer od(sizes_of(axes));
  do {
    const ValueProfile truth = profile_at(config, axes, od.digits());
    const Outcome honest = evaluate_unchecked(mech, config, truth);
    for (std::size_t i = 0; i < config.bidders(); ++i) {
      const double truthful = utility(truth, honest, i);
      std::vector<std::size_t> row;
      for (std::size_t j = 0; j < goods; ++j) row.push_back(axes[i * goods + j].size());
      Odometer dev(row);
      ValueProfile report_profile = truth;
      do {
        for (std::size_t j = 0; j < goods; ++j) report_profile.values(i, j) = axes[i * goods + j][dev.digits()[j]];
        const double deviant = utility(truth, evaluate_unchecked(mech, config, report_profile), i);
        const double gain = deviant - truthful;
        p.max_gain = std::max(p.max_gain, gain);
        ++p.checks;
        if (gain > grid.tolerance) {
          record(p, AuditViolation{std::nullopt, i, to_vec(truth.values.data()), to_vec(report_profile.values.row(i)),
                                   truthful, deviant, gain});
        }
      } while (dev.next());
    }
  } while (od.next());
  std::vector<Partial> parts{std::move(p)};
  report.max_violation = parts[0].max_gain;
  finish(report, parts);
  return report;
}

AuditReport verify_dsic(MechanismId mech, const MarketConfig& config, const DeviationGrid& grid, unsigned threads) {
  check_mechanism_shape(mech, config);
  AuditReport report;
  report.kind = AuditKind::Dsic;
  report.mechanism = mech;
  report.grid_resolution = grid.points;

  if (!is_good_separable(mech)) {
    report.decomposition = "bundle_sums";
    std::vector<Partial> parts{dsic_bundle(config, grid)};
    report.max_violation = parts[0].max_gain;
    finish(report, parts);
    return report;
  }

  report.decomposition = "per_good";
  const std::size_t I = config.bidders();
  const std::size_t J = config.goods();
  std::vector<double> gains(I * J, 0.0);
  auto parts = run_jobs(I * J, resolve_threads(threads), [&](std::size_t k) {
    return dsic_good(mech, config, grid, k % J, k / J, gains[k]);
  });
  // Over the product grid the best full-vector deviation combines the best per-good ones.
  for (std::size_t i = 0; i < I; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j) total += gains[i * J + j];
    report.max_violation = std::max(report.max_violation, total);
  }
  finish(report, parts);

  // Cross-check the decomposition where the undecomposed audit is cheap.
  try {
    const AuditReport full = verify_dsic_full(mech, config, grid, kAutoCrossCheck);
    if (full.passed() != report.passed() ||
        std::abs(full.max_violation - report.max_violation) > kEquivalenceTol * std::max(1.0, regret_cap_formula(config))) {
      throw Error(ErrorCode::NumericalFailure, "per-good audit disagrees with the full-vector audit");
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DimensionTooLarge) throw;
  }
  return report;
}

AuditReport verify_participation_security(MechanismId mech, const MarketConfig& config, const DeviationGrid& grid,
                                          unsigned threads) {
  check_mechanism_shape(mech, config);
  AuditReport report;
  report.kind = AuditKind::ParticipationSecurity;
  report.mechanism = mech;
  report.grid_resolution = grid.points;

  auto check = [&](Partial& p, std::optional<std::size_t> good, std::size_t i, const std::vector<double>& profile,
                   double truthful, double zero_q, double zero_t, double own_value) {
    const double zero_payoff = own_value * zero_q - zero_t;
    p.zero_exact = p.zero_exact && zero_q == 0.0 && zero_t == 0.0;
    p.checks += 2;
    const double worst = std::min(truthful, zero_payoff);
    p.max_gain = std::max(p.max_gain, -worst);
    if (worst < -kParticipationTol) {
      record(p, AuditViolation{good, i, profile, {truthful < zero_payoff ? own_value : 0.0}, truthful, zero_payoff,
                               -worst});
    }
  };

  if (!is_good_separable(mech)) {
    report.decomposition = "full";
    const auto axes = cell_axes(config, grid);
    Partial p;
    Odometer od(sizes_of(axes));
    const ValueProfile zero{Matrix(config.bidders(), config.goods())};
    do {
      const ValueProfile truth = profile_at(config, axes, od.digits());
      const Outcome honest = evaluate_unchecked(mech, config, truth);
      const Outcome silent = evaluate_unchecked(mech, config, zero);
      const double truthful = utility(truth, honest, 0);
      const double zero_payoff = utility(truth, silent, 0);
      double zero_q = 0.0;
      for (std::size_t j = 0; j < config.goods(); ++j) zero_q = std::max(zero_q, silent.allocation(0, j));
      p.zero_exact = p.zero_exact && zero_q == 0.0 && silent.payment(0) == 0.0;
      p.checks += 2;
      const double worst = std::min(truthful, zero_payoff);
      p.max_gain = std::max(p.max_gain, -worst);
      if (worst < -kParticipationTol) {
        record(p, AuditViolation{std::nullopt, 0, to_vec(truth.values.row(0)), {}, truthful, zero_payoff, -worst});
      }
    } while (od.next());
    std::vector<Partial> parts{std::move(p)};
    report.max_violation = parts[0].max_gain;
    finish(report, parts);
    return report;
  }

  report.decomposition = "per_good";
  const std::size_t J = config.goods();
  auto parts = run_jobs(J, resolve_threads(threads), [&](std::size_t j) {
    const std::vector<double> bounds = column_bounds(config, j);
    std::vector<std::vector<double>> axes;
    for (double b : bounds) axes.push_back(grid.axis(b));
    Partial p;
    Odometer od(sizes_of(axes));
    std::vector<double> col(bounds.size());
    do {
      for (std::size_t k = 0; k < col.size(); ++k) col[k] = axes[k][od.digits()[k]];
      const GoodOutcome honest = evaluate_good(mech, bounds, col);
      for (std::size_t i = 0; i < col.size(); ++i) {
        const auto [q, t] = share(honest, i);
        std::vector<double> muted = col;
        muted[i] = 0.0;
        const auto [zq, zt] = share(evaluate_good(mech, bounds, muted), i);
        check(p, j, i, col, col[i] * q - t, zq, zt, col[i]);
      }
    } while (od.next());
    return p;
  });
  for (const auto& p : parts) report.max_violation = std::max(report.max_violation, p.max_gain);
  finish(report, parts);
  return report;
}

DominanceReport compare_ex_post_regret_full(MechanismId a, MechanismId b, const MarketConfig& config,
                                            const DeviationGrid& grid, std::size_t max_evaluations) {
  check_mechanism_shape(a, config);
  check_mechanism_shape(b, config);
  const auto axes = cell_axes(config, grid);
  if (product(sizes_of(axes)) > max_evaluations / 2) {
    throw Error(ErrorCode::DimensionTooLarge, "full-vector regret comparison grid too large");
  }
  DominanceReport report;
  report.a = a;
  report.b = b;
  report.decomposition = "full";
  report.grid_resolution = grid.points;
  double worst = -std::numeric_limits<double>::infinity();
  Odometer od(sizes_of(axes));
  do {
    const ValueProfile v = profile_at(config, axes, od.digits());
    const double d = regret_of(v, evaluate_unchecked(a, config, v)).total -
                     regret_of(v, evaluate_unchecked(b, config, v)).total;
    worst = std::max(worst, d);
    if (d < -grid.tolerance) {
      ++report.strict_witness_count;
      if (report.strict_witnesses.size() < kMaxListed) report.strict_witnesses.push_back(v);
    }
  } while (od.next());
  report.max_violation = std::max(0.0, worst);
  report.weakly_dominated_everywhere = report.max_violation <= grid.tolerance;
  return report;
}

DominanceReport compare_ex_post_regret(MechanismId a, MechanismId b, const MarketConfig& config,
                                       const DeviationGrid& grid, unsigned threads) {
  if (!is_good_separable(a) || !is_good_separable(b)) return compare_ex_post_regret_full(a, b, config, grid);
  check_mechanism_shape(a, config);
  check_mechanism_shape(b, config);

  struct GoodResult {
    double max_diff = 0.0;
    std::vector<std::vector<double>> witnesses;  // columns, lexicographic
    std::size_t count = 0;
  };
  const std::size_t I = config.bidders();
  const std::size_t J = config.goods();
  std::vector<GoodResult> per_good(J);
  run_jobs(J, resolve_threads(threads), [&](std::size_t j) {
    const std::vector<double> bounds = column_bounds(config, j);
    std::vector<std::vector<double>> axes;
    for (double bd : bounds) axes.push_back(grid.axis(bd));
    GoodResult& r = per_good[j];
    Odometer od(sizes_of(axes));
    std::vector<double> col(I);
    do {
      for (std::size_t k = 0; k < I; ++k) col[k] = axes[k][od.digits()[k]];
      const double top = *std::max_element(col.begin(), col.end());
      const double d = (top - evaluate_good(a, bounds, col).payment) - (top - evaluate_good(b, bounds, col).payment);
      r.max_diff = std::max(r.max_diff, d);
      if (d < -grid.tolerance) {
        ++r.count;
        if (r.witnesses.size() < kMaxListed) r.witnesses.push_back(col);
      }
    } while (od.next());
    return Partial{};
  });

  DominanceReport report;
  report.a = a;
  report.b = b;
  report.decomposition = "per_good";
  report.grid_resolution = grid.points;
  // The all-zero column is on every grid and has zero regret under both, so the worst full
  // profile sums per-good worsts, and a per-good witness padded with zero columns is a witness.
  for (const auto& r : per_good) report.max_violation += r.max_diff;
  report.weakly_dominated_everywhere = report.max_violation <= grid.tolerance;
  for (std::size_t j = 0; j < J; ++j) {
    report.strict_witness_count += per_good[j].count;
    for (const auto& col : per_good[j].witnesses) {
      if (report.strict_witnesses.size() >= kMaxListed) break;
      Matrix m(I, J);
      for (std::size_t i = 0; i < I; ++i) m(i, j) = col[i];
      report.strict_witnesses.push_back(ValueProfile{m});
    }
  }
  return report;
}

}  // namespace mmr
