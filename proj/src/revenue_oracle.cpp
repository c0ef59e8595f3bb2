#include "mmregret/revenue_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include "mmregret/distributions.hpp"
#include "mmregret/error.hpp"
#include "mmregret/simplex.hpp"

namespace mmr {

namespace {

constexpr double kAtomStart = 1.0 - 1.0 / kE;
constexpr double kBoundSlack = 1e-9;

// Variable layout: cell c owns allocations c*(K+1) .. c*(K+1)+K-1 and utility c*(K+1)+K.
struct Layout {
  std::size_t goods;
  std::size_t alloc(std::size_t cell, std::size_t good) const { return cell * (goods + 1) + good; }
  std::size_t utility(std::size_t cell) const { return cell * (goods + 1) + goods; }
};

// Gain of type `from` when mimicking `to`, minus its own utility; positive means violated.
double ic_slack(const QuantileDiscretization& d, const ScreeningSolution& s, std::size_t from, std::size_t to) {
  double mimic = -s.payment[to];
  for (std::size_t k = 0; k < d.bounds.size(); ++k) mimic += d.cells[from].values[k] * s.allocation[to][k];
  return mimic - s.utility[from];
}

std::vector<double> ic_row(const QuantileDiscretization& d, const Layout& lay, std::size_t from, std::size_t to) {
  // U_to - U_from + sum_k (v_from,k - v_to,k) Q_to,k <= 0
  std::vector<double> row(d.size() * (lay.goods + 1), 0.0);
  row[lay.utility(to)] += 1.0;
  row[lay.utility(from)] -= 1.0;
  for (std::size_t k = 0; k < lay.goods; ++k) {
    row[lay.alloc(to, k)] = d.cells[from].values[k] - d.cells[to].values[k];
  }
  return row;
}

ScreeningSolution unpack(const QuantileDiscretization& d, const Layout& lay, const std::vector<double>& x) {
  ScreeningSolution s;
  s.allocation.assign(d.size(), std::vector<double>(lay.goods));
  s.payment.resize(d.size());
  s.utility.resize(d.size());
  for (std::size_t c = 0; c < d.size(); ++c) {
    double gross = 0.0;
    for (std::size_t k = 0; k < lay.goods; ++k) {
      s.allocation[c][k] = std::clamp(x[lay.alloc(c, k)], 0.0, 1.0);
      gross += d.cells[c].values[k] * s.allocation[c][k];
    }
    s.utility[c] = std::max(0.0, x[lay.utility(c)]);
    s.payment[c] = gross - s.utility[c];
    s.revenue += d.cells[c].mass * s.payment[c];
  }
  return s;
}

}  // namespace

double QuantileDiscretization::expected_surplus() const {
  double total = 0.0;
  for (const auto& cell : cells) total += cell.mass * std::accumulate(cell.values.begin(), cell.values.end(), 0.0);
  return total;
}

QuantileDiscretization build_discretization(const std::vector<double>& bounds, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::TooFewCells, "need at least 4 continuous cells");
  if (bounds.empty()) throw Error(ErrorCode::OutOfRange, "need at least one good");
  for (double b : bounds) {
    if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::OutOfRange, "bounds must be positive");
  }
  QuantileDiscretization d;
  d.bounds = bounds;
  d.n_continuous = n;
  const double width = kAtomStart / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    QuantileCell cell;
    cell.z = static_cast<double>(k) * width;
    cell.mass = width;
    for (double b : bounds) cell.values.push_back(er_quantile(b, cell.z));
    d.cells.push_back(std::move(cell));
  }
  QuantileCell atom;
  atom.z = kAtomStart;
  atom.mass = 1.0 / kE;
  atom.values = bounds;
  d.cells.push_back(std::move(atom));
  return d;
}

ScreeningLP solve_screening_lp(const QuantileDiscretization& disc, const ScreeningOptions& options) {
  const Layout lay{disc.bounds.size()};
  const std::size_t cells = disc.size();
  lp::LinearProgram prog(cells * (lay.goods + 1));
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t k = 0; k < lay.goods; ++k) {
      prog.c[lay.alloc(c, k)] = disc.cells[c].mass * disc.cells[c].values[k];
      prog.upper[lay.alloc(c, k)] = 1.0;
    }
    prog.c[lay.utility(c)] = -disc.cells[c].mass;  // utility >= 0 is participation
  }

  // Start from adjacent-type constraints and add violated pairs until none remain.
  std::vector<std::vector<bool>> present(cells, std::vector<bool>(cells, false));
  auto add_pair = [&](std::size_t from, std::size_t to) {
    if (present[from][to]) return;
    present[from][to] = true;
    prog.add_row(ic_row(disc, lay, from, to), 0.0);
  };
  for (std::size_t c = 0; c + 1 < cells; ++c) {
    add_pair(c, c + 1);
    add_pair(c + 1, c);
  }
  if (options.all_pairs) {
    for (std::size_t from = 0; from < cells; ++from)
      for (std::size_t to = 0; to < cells; ++to)
        if (from != to) add_pair(from, to);
  }

  ScreeningLP out;
  out.variables = prog.cols;
  out.ic_constraints_total = cells * (cells - 1);
  const double scale = *std::max_element(disc.bounds.begin(), disc.bounds.end());
  while (true) {
    ++out.rounds;
    const lp::LpSolution sol = lp::solve(prog);
    if (sol.status != lp::LpStatus::Optimal) throw Error(ErrorCode::NumericalFailure, "screening LP not optimal");
    out.iterations += sol.iterations;
    out.extended_precision = out.extended_precision || sol.extended_precision;
    out.solution = unpack(disc, lay, sol.x);

    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> violated;
    for (std::size_t from = 0; from < cells; ++from) {
      for (std::size_t to = 0; to < cells; ++to) {
        if (from == to || present[from][to]) continue;
        const double v = ic_slack(disc, out.solution, from, to);
        if (v > 1e-10 * scale) violated.push_back({v, {from, to}});
      }
    }
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t take = std::min(violated.size(), 2 * cells);
    for (std::size_t v = 0; v < take; ++v) add_pair(violated[v].second.first, violated[v].second.second);
  }
  out.ic_constraints_used = prog.rows;
  return out;
}

double screening_violation(const QuantileDiscretization& disc, const ScreeningSolution& sol) {
  double worst = 0.0;
  for (std::size_t from = 0; from < disc.size(); ++from) {
    worst = std::max(worst, -sol.utility[from]);
    double own = -sol.payment[from];
    for (std::size_t k = 0; k < disc.bounds.size(); ++k) own += disc.cells[from].values[k] * sol.allocation[from][k];
    worst = std::max(worst, std::abs(own - sol.utility[from]));
    for (std::size_t to = 0; to < disc.size(); ++to) {
      if (to != from) worst = std::max(worst, ic_slack(disc, sol, from, to));
    }
  }
  return worst;
}

ScreeningSolution posted_price_solution(const QuantileDiscretization& disc) {
  const double price = std::accumulate(disc.bounds.begin(), disc.bounds.end(), 0.0) / kE;
  ScreeningSolution s;
  s.allocation.assign(disc.size(), std::vector<double>(disc.bounds.size(), 1.0));
  s.payment.assign(disc.size(), price);
  s.utility.resize(disc.size());
  for (std::size_t c = 0; c < disc.size(); ++c) {
    const auto& v = disc.cells[c].values;
    s.utility[c] = std::accumulate(v.begin(), v.end(), 0.0) - price;
    s.revenue += disc.cells[c].mass * price;
  }
  return s;
}

double best_posted_bundle_revenue(const QuantileDiscretization& disc) {
  double best = 0.0;
  double mass_above = 0.0;
  for (std::size_t c = disc.size(); c-- > 0;) {
    mass_above += disc.cells[c].mass;
    const auto& v = disc.cells[c].values;
    best = std::max(best, std::accumulate(v.begin(), v.end(), 0.0) * mass_above);
  }
  return best;
}

double envelope_gap(const QuantileDiscretization& disc, const ScreeningSolution& sol) {
  double worst = 0.0;
  for (std::size_t c = 0; c + 1 < disc.size(); ++c) {
    double upper = 0.0;
    double lower = 0.0;
    for (std::size_t k = 0; k < disc.bounds.size(); ++k) {
      const double dv = disc.cells[c + 1].values[k] - disc.cells[c].values[k];
      upper += dv * sol.allocation[c + 1][k];
      lower += dv * sol.allocation[c][k];
    }
    const double du = sol.utility[c + 1] - sol.utility[c];
    worst = std::max({worst, du - upper, lower - du});
  }
  return worst;
}

LowerBoundCertificate verify_lower_bound(const MarketConfig& config, std::size_t n, unsigned threads) {
  if (n < 50) throw Error(ErrorCode::OutOfRange, "lower-bound certification needs N >= 50");
  const SelectionMap sel = select_bidders(config);

  LowerBoundCertificate cert;
  cert.n = n;
  for (std::size_t i = 0; i < config.bidders(); ++i) {
    if (sel.goods_of[i].empty()) continue;
    BidderCertificate b;
    b.bidder = i;
    b.goods = sel.goods_of[i];
    cert.bidders.push_back(std::move(b));
  }

  auto run = [&config, n](BidderCertificate& b) {
    std::vector<double> bounds;
    for (std::size_t j : b.goods) bounds.push_back(config.bound(b.bidder, j));
    const QuantileDiscretization disc = build_discretization(bounds, n);
    b.lp = solve_screening_lp(disc);
    b.lp_revenue = b.lp.solution.revenue;
    b.analytic_bound = std::accumulate(bounds.begin(), bounds.end(), 0.0) / kE;
    b.discrete_surplus = disc.expected_surplus();
    b.posted_price_revenue = posted_price_solution(disc).revenue;
    b.best_threshold_revenue = best_posted_bundle_revenue(disc);
    b.envelope_gap = envelope_gap(disc, b.lp.solution);
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || cert.bidders.size() == 1) {
    for (auto& b : cert.bidders) run(b);
  } else {
    std::vector<std::future<void>> jobs;
    for (auto& b : cert.bidders) jobs.push_back(std::async(std::launch::async, run, std::ref(b)));
    for (auto& j : jobs) j.get();
  }

  double bound_scale = 0.0;
  for (const auto& b : cert.bidders) {
    cert.lp_sum += b.lp_revenue;
    cert.discretized_full_surplus += b.discrete_surplus;
    bound_scale += b.analytic_bound * kE;
  }
  cert.analytic_bound = regret_cap_formula(config);
  cert.analytic_full_surplus = 2.0 * cert.analytic_bound;
  cert.certified_regret_lower_bound = cert.discretized_full_surplus - cert.lp_sum;
  cert.width = cert.analytic_bound - cert.certified_regret_lower_bound;
  cert.observed_constant = cert.width * static_cast<double>(n);
  // Left-endpoint cells underestimate the mean of each value by at most
  // (1 - 1/e) (bound - bound/e) / N, so the surplus gap is at most sum(bound) (1 - 1/e)^2 / N.
  cert.convergence_constant = bound_scale * kAtomStart * kAtomStart;
  cert.lp_within_bound = cert.lp_sum <= cert.analytic_bound + kBoundSlack;
  cert.lower_bound_within_tolerance =
      cert.certified_regret_lower_bound >= cert.analytic_bound - cert.tolerance() - kBoundSlack;
  return cert;
}

}  // namespace mmr
