#include "mmregret/io/report.hpp"

#include <charconv>

namespace mmr::io {

using nlohmann::json;

json to_json(const Matrix& m) { return m.to_rows(); }

json to_json(const Outcome& outcome) {
  return {{"allocations", to_json(outcome.allocations())},
          {"per_good_payments", to_json(outcome.per_good_payments())},
          {"payments", outcome.payments()}};
}

json to_json(const RegretReport& report) {
  json j{{"per_good", report.per_good}, {"total", report.total}};
  if (report.se) j["se"] = *report.se;
  if (report.n) j["n"] = *report.n;
  return j;
}

json to_json(const SearchResult& result) {
  return {{"profile", to_json(result.profile.values)},
          {"attained", result.value},
          {"max_probe", result.max_probe},
          {"evaluations", result.evaluations}};
}

json to_json(const AuditReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    json item{{"bidder", v.bidder},
              {"profile", v.profile},
              {"deviation", v.deviation},
              {"truthful_utility", v.truthful_utility},
              {"deviant_utility", v.deviant_utility},
              {"gap", v.gap}};
    item["good"] = v.good ? json(*v.good) : json(nullptr);
    violations.push_back(std::move(item));
  }
  json j{{"check", to_string(report.kind)},
         {"mechanism", std::string(tag(report.mechanism))},
         {"decomposition", report.decomposition},
         {"grid_resolution", report.grid_resolution},
         {"checks", report.checks},
         {"violation_count", report.violation_count},
         {"violations", std::move(violations)},
         {"max_violation", report.max_violation},
         {"passed", report.passed()}};
  if (report.kind == AuditKind::ParticipationSecurity) j["zero_report_exact"] = report.zero_report_exact;
  return j;
}

json to_json(const DominanceReport& report) {
  json witnesses = json::array();
  for (const auto& w : report.strict_witnesses) witnesses.push_back(to_json(w.values));
  return {{"a", std::string(tag(report.a))},
          {"b", std::string(tag(report.b))},
          {"decomposition", report.decomposition},
          {"grid_resolution", report.grid_resolution},
          {"weakly_dominated_everywhere", report.weakly_dominated_everywhere},
          {"strict_witness_count", report.strict_witness_count},
          {"strict_witnesses", std::move(witnesses)},
          {"max_violation", report.max_violation}};
}

json to_json(const LowerBoundCertificate& cert) {
  json per_bidder = json::array();
  json lps = json::array();
  for (const auto& b : cert.bidders) {
    lps.push_back(b.lp_revenue);
    per_bidder.push_back({{"bidder", b.bidder},
                          {"goods", b.goods},
                          {"lp_revenue", b.lp_revenue},
                          {"analytic_bound", b.analytic_bound},
                          {"discrete_surplus", b.discrete_surplus},
                          {"posted_price_revenue", b.posted_price_revenue},
                          {"best_threshold_revenue", b.best_threshold_revenue},
                          {"envelope_gap", b.envelope_gap},
                          {"lp_rounds", b.lp.rounds},
                          {"lp_incentive_rows", b.lp.ic_constraints_used},
                          {"lp_incentive_pairs", b.lp.ic_constraints_total},
                          {"lp_iterations", b.lp.iterations},
                          {"extended_precision", b.lp.extended_precision}});
  }
  return {{"N", cert.n},
          {"per_bidder_lp", std::move(lps)},
          {"sum", cert.lp_sum},
          {"analytic_bound", cert.analytic_bound},
          {"certified_regret_lower_bound", cert.certified_regret_lower_bound},
          {"discretized_full_surplus", cert.discretized_full_surplus},
          {"analytic_full_surplus", cert.analytic_full_surplus},
          {"width", cert.width},
          {"convergence_constant", cert.convergence_constant},
          {"observed_constant", cert.observed_constant},
          {"tolerance", cert.tolerance()},
          {"lp_within_bound", cert.lp_within_bound},
          {"certified", cert.certified()},
          {"bidders", std::move(per_bidder)}};
}

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::cell(double x) {
  sep();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace mmr::io
