#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mmregret/distributions.hpp"
#include "mmregret/market.hpp"
#include "mmregret/mechanisms.hpp"

namespace mmr::io {

/// Parses top-level `key = value` lines: integers, floats, strings, booleans and
/// (nested, possibly multi-line) arrays; `#` comments. Tables are rejected. Throws ParseError.
nlohmann::json parse_toml(std::string_view text);

/// Reads a .json file as JSON and anything else as TOML.
nlohmann::json load_document(const std::filesystem::path& path);

/// Everything a run can take from a scenario file. Unset fields fall back to CLI flags.
struct Scenario {
  std::optional<MarketConfig> config;
  std::optional<MechanismId> mechanism;
  std::optional<DistributionKind> distribution;
  std::optional<std::size_t> n_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> lp_n;
  std::optional<Matrix> profile;
};

/// Keys: upper_bounds (matrix, rows = bidders), mechanism, distribution, n_samples,
/// seed, grid, lp_n, profile. Unknown keys are a ParseError.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

Matrix matrix_from_json(const nlohmann::json& value, std::string_view key);

/// "a,b;c,d" -> [[a,b],[c,d]]. Throws ParseError on anything else.
Matrix parse_matrix(std::string_view text);
std::vector<double> parse_vector(std::string_view text);

/// Reads a profile for a config: explicit rows, or a flat row-major list of I*J entries.
Matrix parse_profile(std::string_view text, std::size_t bidders, std::size_t goods);

}  // namespace mmr::io
