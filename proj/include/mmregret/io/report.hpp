#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmregret/audit.hpp"
#include "mmregret/regret.hpp"
#include "mmregret/revenue_oracle.hpp"

namespace mmr::io {

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Outcome& outcome);
nlohmann::json to_json(const RegretReport& report);
nlohmann::json to_json(const SearchResult& result);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const DominanceReport& report);
nlohmann::json to_json(const LowerBoundCertificate& cert);

/// Shortest text that reads back to the same double.
std::string format_number(double x);

/// Minimal CSV writer; cells are numbers or identifiers, so no quoting is needed.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& cell(double x);
  CsvWriter& cell(std::size_t x);
  CsvWriter& cell(const std::string& s);
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace mmr::io
