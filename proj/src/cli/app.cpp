#include "mmregret/cli/app.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "mmregret/audit.hpp"
#include "mmregret/distributions.hpp"
#include "mmregret/error.hpp"
#include "mmregret/io/document.hpp"
#include "mmregret/io/report.hpp"
#include "mmregret/mechanisms.hpp"
#include "mmregret/regret.hpp"
#include "mmregret/revenue_oracle.hpp"
#include "mmregret/simd/kernels.hpp"

namespace mmr::cli {

namespace {

using nlohmann::json;

struct Flags {
  std::string config_path;
  std::string bounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> lp_n;
  std::string out_dir;
  unsigned threads = 1;
  std::string mechanism;
  std::string distribution;
  std::string profile;
  std::string mode;
  std::string append;
  std::string simd;
};

// Flags resolved against the scenario file.
struct Context {
  Flags flags;
  io::Scenario scenario;
  std::ostream& out;

  const MarketConfig& config() {
    if (!flags.bounds.empty()) {
      if (!bounds_override) bounds_override = validate_config(io::parse_matrix(flags.bounds));
      return *bounds_override;
    }
    if (!scenario.config) throw Error(ErrorCode::ParseError, "no market: pass --bounds or a --config with upper_bounds");
    return *scenario.config;
  }
  MechanismId mechanism() const {
    if (!flags.mechanism.empty()) {
      const auto m = parse_mechanism(flags.mechanism);
      if (!m) throw Error(ErrorCode::ParseError, "unknown mechanism '" + flags.mechanism + "'");
      return *m;
    }
    return scenario.mechanism.value_or(MechanismId::Ssprr);
  }
  DistributionKind distribution() const {
    if (!flags.distribution.empty()) {
      const auto d = parse_distribution(flags.distribution);
      if (!d) throw Error(ErrorCode::ParseError, "unknown distribution '" + flags.distribution + "'");
      return *d;
    }
    return scenario.distribution.value_or(DistributionKind::WorstCase);
  }
  std::uint64_t seed() const {
    if (flags.seed) return *flags.seed;
    if (scenario.seed) return *scenario.seed;
    throw Error(ErrorCode::ParseError, "this command draws random numbers: pass --seed or set seed in the scenario");
  }
  bool has_seed() const { return flags.seed || scenario.seed; }
  std::size_t samples(std::size_t fallback) const { return flags.samples.value_or(scenario.n_samples.value_or(fallback)); }
  bool has_samples() const { return flags.samples || scenario.n_samples; }
  std::size_t grid(std::size_t fallback) const { return flags.grid.value_or(scenario.grid.value_or(fallback)); }
  std::size_t lp_n() const { return flags.lp_n.value_or(scenario.lp_n.value_or(200)); }
  std::optional<Matrix> profile() {
    if (!flags.profile.empty()) return io::parse_profile(flags.profile, config().bidders(), config().goods());
    return scenario.profile;
  }

  // Prints the report and, with --out, also stores it as <name>.
  void emit_json(const std::string& name, const json& report) {
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!flags.out_dir.empty()) write_file(name, text);
  }
  void emit_csv(const std::string& name, const std::string& text) {
    if (flags.out_dir.empty()) {
      out << text;
    } else {
      write_file(name, text);
      out << (std::filesystem::path(flags.out_dir) / name).string() << "\n";
    }
  }
  void write_file(const std::string& name, const std::string& text) const {
    std::filesystem::create_directories(flags.out_dir);
    const auto path = std::filesystem::path(flags.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorCode::ParseError, "cannot write '" + path.string() + "'");
  }

  std::optional<MarketConfig> bounds_override;
};

void write_outcome_rows(io::CsvWriter& csv, std::size_t index, const ValueProfile& v, const Outcome& o) {
  for (std::size_t i = 0; i < o.bidders(); ++i) {
    for (std::size_t j = 0; j < o.goods(); ++j) {
      csv.cell(index).cell(i).cell(j).cell(v.values(i, j)).cell(o.allocation(i, j)).cell(o.payment(i, j));
      csv.end_row();
    }
  }
}

int cmd_eval(Context& ctx) {
  const MarketConfig& config = ctx.config();
  const MechanismId mech = ctx.mechanism();
  std::vector<ValueProfile> profiles;
  if (auto p = ctx.profile()) {
    profiles.push_back(ValueProfile{*p});
  } else if (ctx.has_samples()) {
    profiles = ProfileSampler(ctx.distribution(), config, ctx.seed()).generate(0, ctx.samples(0));
  } else {
    throw Error(ErrorCode::ParseError, "eval needs --profile or --samples");
  }
  std::ostringstream text;
  io::CsvWriter csv(text, {"profile", "bidder", "good", "value", "allocation", "payment"});
  for (std::size_t k = 0; k < profiles.size(); ++k) write_outcome_rows(csv, k, profiles[k], evaluate(mech, config, profiles[k]));
  ctx.emit_csv("eval.csv", text.str());
  return kExitOk;
}

int cmd_sample(Context& ctx) {
  const ProfileSampler sampler(ctx.distribution(), ctx.config(), ctx.seed());
  const std::size_t n = ctx.samples(1000);
  std::ostringstream text;
  io::CsvWriter csv(text, {"sample", "bidder", "good", "value"});
  for (std::size_t k = 0; k < n; ++k) {
    const ValueProfile v = sampler.sample(k);
    for (std::size_t i = 0; i < v.values.rows(); ++i) {
      for (std::size_t j = 0; j < v.values.cols(); ++j) {
        csv.cell(k).cell(i).cell(j).cell(v.values(i, j));
        csv.end_row();
      }
    }
  }
  ctx.emit_csv("samples.csv", text.str());
  return kExitOk;
}

json search_report(Context& ctx, MechanismId mech, const MarketConfig& config, double cap) {
  SearchOptions opts;
  opts.threads = ctx.flags.threads;
  const SearchResult r = adversarial_profile_search(mech, config, ctx.samples(20000), ctx.seed(), opts);
  json j = io::to_json(r);
  j["cap"] = cap;
  j["gap"] = cap - r.value;
  j["excess"] = r.max_probe - cap;
  return j;
}

int cmd_regret_cap(Context& ctx) {
  const MarketConfig& config = ctx.config();
  const MechanismId mech = ctx.mechanism();
  check_mechanism_shape(mech, config);
  const double cap = regret_cap_formula(config);
  json report{{"mechanism", std::string(tag(mech))}, {"bounds", io::to_json(config.bounds())}, {"cap", cap}};
  report["search"] = search_report(ctx, mech, config, cap);
  ctx.emit_json("regret_cap.json", report);
  return kExitOk;
}

int cmd_expected_regret(Context& ctx) {
  const MarketConfig& config = ctx.config();
  const MechanismId mech = ctx.mechanism();
  const DistributionKind dist = ctx.distribution();
  const std::size_t n = ctx.samples(100000);
  MonteCarloOptions opts;
  opts.threads = ctx.flags.threads;
  for (std::size_t c = 1000; c < n; c *= 10) opts.checkpoints.push_back(c);
  opts.checkpoints.push_back(n);
  const MonteCarloResult mc = expected_regret_mc_traced(mech, dist, config, n, ctx.seed(), opts);

  json report{{"mechanism", std::string(tag(mech))},
              {"distribution", std::string(tag(dist))},
              {"seed", ctx.seed()},
              {"cap", regret_cap_formula(config)},
              {"monte_carlo", io::to_json(mc.report)}};
  if (ctx.flags.grid || ctx.scenario.grid) {
    if (dist != DistributionKind::WorstCase) throw Error(ErrorCode::ParseError, "quadrature is only for worst_case");
    report["quadrature"] = {{"grid", ctx.grid(0)},
                            {"value", expected_regret_quadrature_worst_case(mech, config, ctx.grid(0))}};
  }
  if (!ctx.flags.out_dir.empty()) {
    std::ostringstream text;
    io::CsvWriter csv(text, {"n", "mean", "se"});
    for (const auto& p : mc.trace) {
      csv.cell(p.n).cell(p.mean).cell(p.se);
      csv.end_row();
    }
    ctx.write_file("expected_regret_trace.csv", text.str());
  }
  ctx.emit_json("expected_regret.json", report);
  return kExitOk;
}

int cmd_certify(Context& ctx) {
  const LowerBoundCertificate cert = verify_lower_bound(ctx.config(), ctx.lp_n(), ctx.flags.threads);
  json report = io::to_json(cert);
  report["sandwich"] = {cert.certified_regret_lower_bound, cert.analytic_bound};
  ctx.emit_json("certify.json", report);
  return cert.certified() ? kExitOk : kExitNumerical;
}

int cmd_audit(Context& ctx) {
  const MarketConfig& config = ctx.config();
  const MechanismId mech = ctx.mechanism();
  DeviationGrid grid;
  grid.points = ctx.grid(50);
  const unsigned threads = ctx.flags.threads;
  json report{{"mechanism", std::string(tag(mech))}, {"grid_resolution", grid.points}};
  report["dsic"] = io::to_json(verify_dsic(mech, config, grid, threads));
  report["participation_security"] = io::to_json(verify_participation_security(mech, config, grid, threads));
  if (mech != MechanismId::GrandBundle1B && mech != MechanismId::PostedSeparate1B && mech != MechanismId::DigitalGoods) {
    report["dominance"] =
        io::to_json(compare_ex_post_regret(MechanismId::Ssprr, MechanismId::AnonymousSsprr, config, grid, threads));
  }
  ctx.emit_json("audit.json", report);
  return kExitOk;
}

MarketConfig append_row(const MarketConfig& config, const std::vector<double>& row) {
  auto rows = config.bounds().to_rows();
  rows.push_back(row);
  return validate_config(Matrix::from_rows(rows));
}

int cmd_statics(Context& ctx) {
  const MarketConfig& base = ctx.config();
  const std::string& mode = ctx.flags.mode;
  const double before = regret_cap_formula(base);
  json report{{"mode", mode}, {"bounds", io::to_json(base.bounds())}, {"before", before}};
  bool holds = false;

  if (mode == "add_good" || mode == "add_bidder") {
    if (ctx.flags.append.empty()) throw Error(ErrorCode::ParseError, mode + " needs --append");
    const std::vector<double> extra = io::parse_vector(ctx.flags.append);
    MarketConfig after_config = base;
    if (mode == "add_good") {
      if (extra.size() != base.bidders()) throw Error(ErrorCode::ShapeMismatch, "--append needs one bound per bidder");
      auto rows = base.bounds().to_rows();
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back(extra[i]);
      after_config = validate_config(Matrix::from_rows(rows));
    } else {
      if (extra.size() != base.goods()) throw Error(ErrorCode::ShapeMismatch, "--append needs one bound per good");
      after_config = append_row(base, extra);
    }
    const double after = regret_cap_formula(after_config);
    report["after"] = after;
    report["after_bounds"] = io::to_json(after_config.bounds());
    report["strict"] = after > before;
    if (mode == "add_good") {
      // Strict whenever the new good has a positive bound; a zero column adds nothing.
      const bool positive = std::any_of(extra.begin(), extra.end(), [](double x) { return x > 0.0; });
      report["expected"] = positive ? "strict_increase" : "unchanged";
      holds = positive ? after > before : after == before;
    } else {
      report["expected"] = "weak_increase";
      holds = after >= before;
    }
  } else if (mode == "average") {
    const auto rows = base.bounds().to_rows();
    for (const auto& r : rows) {
      if (r != rows.front()) throw Error(ErrorCode::SymmetryRequired, "average mode needs identical bounds for every bidder");
    }
    json table = json::array();
    holds = true;
    double previous = 0.0;
    MarketConfig current = validate_config(Matrix::from_rows({rows.front()}));
    for (std::size_t bidders = 1; bidders <= rows.size() + 1; ++bidders) {
      if (bidders > 1) current = append_row(current, rows.front());
      const double cap = regret_cap_formula(current);
      const double average = cap / static_cast<double>(bidders);
      table.push_back({{"bidders", bidders}, {"cap", cap}, {"average", average}});
      if (bidders > 1) holds = holds && average < previous;
      previous = average;
    }
    report["expected"] = "strict_decrease";
    report["table"] = std::move(table);
  } else {
    throw Error(ErrorCode::ParseError, "--mode must be add_good, add_bidder or average");
  }
  report["holds"] = holds;
  ctx.emit_json("statics.json", report);
  return holds ? kExitOk : kExitNumerical;
}

int cmd_digital(Context& ctx) {
  Matrix raw = !ctx.flags.bounds.empty() ? io::parse_matrix(ctx.flags.bounds)
               : ctx.scenario.config   ? ctx.scenario.config->bounds()
                                       : throw Error(ErrorCode::ParseError, "digital needs --bounds or a --config");
  if (raw.rows() != 1 && raw.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "digital bounds must be a single row or column");
  const std::vector<double> bounds(raw.data().begin(), raw.data().end());
  const MarketConfig config = digital_goods_config(bounds);
  const double cap = regret_cap_formula(config);
  json report{{"mechanism", "digital"}, {"bounds", bounds}, {"cap", cap}};
  if (!ctx.flags.profile.empty()) {
    const std::vector<double> values = io::parse_vector(ctx.flags.profile);
    const Outcome o = digital_goods_outcome(bounds, values);
    json rows = json::array();
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      rows.push_back({{"bidder", i}, {"value", values[i]}, {"allocation", o.allocation(i, i)}, {"payment", o.payment(i)}});
    }
    report["outcome"] = std::move(rows);
    report["regret"] = io::to_json(regret_of(digital_goods_profile(values), o));
  }
  if (ctx.has_seed()) report["search"] = search_report(ctx, MechanismId::DigitalGoods, config, cap);
  ctx.emit_json("digital.json", report);
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NumericalFailure:
    case ErrorCode::InfeasibleOutcome:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax-regret mechanism toolkit", "mmr"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config_path, "Scenario file (TOML, or JSON by extension)");
  app.add_option("--bounds", flags.bounds, "Upper bounds, rows ';'-separated, entries ','-separated");
  app.add_option("--seed", flags.seed, "RNG seed (required wherever randomness is used)");
  app.add_option("--samples", flags.samples, "Sample count or search budget");
  app.add_option("--grid", flags.grid, "Grid resolution (audit points per axis, quadrature cells)");
  app.add_option("--lp-n", flags.lp_n, "Continuous cells per bidder in the screening LP");
  app.add_option("--out", flags.out_dir, "Directory for CSV/JSON artifacts");
  app.add_option("--threads", flags.threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--mechanism", flags.mechanism, "ssprr, anonymous, bundle1b, digital or posted1b");
  app.add_option("--distribution", flags.distribution, "worst_case, single_bidder_comonotonic or iid_uniform");
  app.add_option("--profile", flags.profile, "Value profile: row-major list or ';'-separated rows");
  app.add_option("--mode", flags.mode, "statics mode: add_good, add_bidder or average");
  app.add_option("--append", flags.append, "Bounds appended by statics");
  app.add_option("--simd", flags.simd, "Kernel variant: scalar or avx2");

  using Handler = int (*)(Context&);
  std::vector<std::pair<CLI::App*, Handler>> commands{
      {app.add_subcommand("eval", "Outcomes (q, t) per profile as CSV"), cmd_eval},
      {app.add_subcommand("sample", "Draw value profiles as CSV"), cmd_sample},
      {app.add_subcommand("regret-cap", "Regret cap and adversarial search"), cmd_regret_cap},
      {app.add_subcommand("expected-regret", "Monte Carlo (and quadrature) expected regret"), cmd_expected_regret},
      {app.add_subcommand("certify", "Screening-LP lower bound sandwich"), cmd_certify},
      {app.add_subcommand("audit", "Incentive and dominance audits"), cmd_audit},
      {app.add_subcommand("statics", "Comparative statics of the regret cap"), cmd_statics},
      {app.add_subcommand("digital", "Digital goods posted prices"), cmd_digital},
  };

  std::vector<const char*> argv{"mmr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (!flags.simd.empty()) {
      const auto isa = simd::parse_isa(flags.simd);
      if (!isa || !simd::isa_supported(*isa)) throw Error(ErrorCode::ParseError, "unsupported --simd '" + flags.simd + "'");
      simd::set_isa(*isa);
    }
    Context ctx{flags, {}, out, std::nullopt};
    if (!flags.config_path.empty()) ctx.scenario = io::load_scenario(flags.config_path);
    for (auto& [sub, handler] : commands) {
      if (sub->parsed()) return handler(ctx);
    }
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, out, err);
}

}  // namespace mmr::cli
