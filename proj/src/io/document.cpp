#include "mmregret/io/document.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmregret/error.hpp"

namespace mmr::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : s_(text) {}

  json parse() {
    json doc = json::object();
    while (true) {
      skip_blank_lines();
      if (at_end()) return doc;
      if (peek() == '[') fail(where("tables are not supported"));
      const std::string key = read_key();
      skip_inline_space();
      if (!consume('=')) fail(where("expected '=' after key"));
      skip_inline_space();
      json value = read_value();
      if (doc.contains(key)) fail(where("duplicate key '" + key + "'"));
      doc[key] = std::move(value);
      skip_inline_space();
      skip_comment();
      if (!at_end() && !consume('\n')) fail(where("trailing characters after value"));
    }
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  std::string where(const std::string& msg) const {
    std::size_t line = 1;
    for (std::size_t k = 0; k < pos_ && k < s_.size(); ++k) line += s_[k] == '\n';
    return msg + " (line " + std::to_string(line) + ")";
  }
  void skip_inline_space() {
    while (peek() == ' ' || peek() == '\t' || peek() == '\r') ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (!consume('\n')) return;
    }
  }
  // Inside arrays newlines and comments are whitespace.
  void skip_array_space() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (!consume('\n')) return;
    }
  }

  std::string read_key() {
    if (peek() == '"') return read_string();
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') ++pos_;
    if (pos_ == start) fail(where("expected a key"));
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string read_string() {
    if (!consume('"')) fail(where("expected '\"'"));
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail(where("unterminated string"));
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        const char e = at_end() ? '\0' : s_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(where("unsupported escape in string"));
        }
      } else {
        out += c;
      }
    }
  }

  json read_value() {
    const char c = peek();
    if (c == '"') return read_string();
    if (c == '[') return read_array();
    if (s_.substr(pos_, 4) == "true") { pos_ += 4; return true; }
    if (s_.substr(pos_, 5) == "false") { pos_ += 5; return false; }
    return read_number();
  }

  json read_array() {
    consume('[');
    json arr = json::array();
    skip_array_space();
    if (consume(']')) return arr;
    while (true) {
      skip_array_space();
      arr.push_back(read_value());
      skip_array_space();
      if (consume(']')) return arr;
      if (!consume(',')) fail(where("expected ',' or ']' in array"));
      skip_array_space();
      if (consume(']')) return arr;  // trailing comma
    }
  }

  json read_number() {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') ++pos_;
      else break;
    }
    std::string token(s_.substr(start, pos_ - start));
    std::erase(token, '_');
    if (token.empty()) fail(where("expected a value"));
    const bool is_float = token.find_first_of(".eE") != std::string::npos || token == "inf" || token == "nan";
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!is_float) {
      if (token[0] != '-') {
        std::uint64_t u = 0;
        if (token[0] == '+') ++first;
        auto [p, ec] = std::from_chars(first, last, u);
        if (ec == std::errc() && p == last) return u;
      } else {
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(first, last, i);
        if (ec == std::errc() && p == last) return i;
      }
      fail(where("invalid integer '" + token + "'"));
    }
    if (*first == '+') ++first;
    double d = 0.0;
    auto [p, ec] = std::from_chars(first, last, d);
    if (ec != std::errc() || p != last) fail(where("invalid number '" + token + "'"));
    return d;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double number_from_json(const json& v, std::string_view key) {
  if (!v.is_number()) fail("'" + std::string(key) + "' must hold numbers");
  return v.get<double>();
}

std::size_t count_from_json(const json& v, std::string_view key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    fail("'" + std::string(key) + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> split_numbers(std::string_view text, char sep) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    std::string_view tok = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double d = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) {
      fail("malformed number '" + std::string(tok) + "'");
    }
    out.push_back(d);
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return TomlReader(text).parse(); }

nlohmann::json load_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
  }
  return parse_toml(buf.str());
}

Matrix matrix_from_json(const nlohmann::json& value, std::string_view key) {
  if (!value.is_array()) fail("'" + std::string(key) + "' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : value) {
    if (!row.is_array()) fail("'" + std::string(key) + "' must be an array of rows");
    std::vector<double> r;
    for (const auto& x : row) r.push_back(number_from_json(x, key));
    rows.push_back(std::move(r));
  }
  return Matrix::from_rows(rows);
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("scenario must be a table of keys");
  Scenario sc;
  for (const auto& [key, value] : doc.items()) {
    if (key == "upper_bounds") {
      sc.config = validate_config(matrix_from_json(value, key));
    } else if (key == "mechanism") {
      if (!value.is_string()) fail("'mechanism' must be a string");
      sc.mechanism = parse_mechanism(value.get<std::string>());
      if (!sc.mechanism) fail("unknown mechanism '" + value.get<std::string>() + "'");
    } else if (key == "distribution") {
      if (!value.is_string()) fail("'distribution' must be a string");
      sc.distribution = parse_distribution(value.get<std::string>());
      if (!sc.distribution) fail("unknown distribution '" + value.get<std::string>() + "'");
    } else if (key == "n_samples") {
      sc.n_samples = count_from_json(value, key);
    } else if (key == "seed") {
      if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        fail("'seed' must be an unsigned 64-bit integer");
      }
      sc.seed = value.get<std::uint64_t>();
    } else if (key == "grid") {
      sc.grid = count_from_json(value, key);
    } else if (key == "lp_n") {
      sc.lp_n = count_from_json(value, key);
    } else if (key == "profile") {
      sc.profile = matrix_from_json(value, key);
    } else {
      fail("unknown scenario key '" + key + "'");
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(load_document(path)); }

Matrix parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(';', start);
    rows.push_back(split_numbers(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start), ','));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return Matrix::from_rows(rows);
}

std::vector<double> parse_vector(std::string_view text) { return split_numbers(text, ','); }

Matrix parse_profile(std::string_view text, std::size_t bidders, std::size_t goods) {
  if (text.find(';') == std::string_view::npos) {
    const std::vector<double> flat = parse_vector(text);
    if (flat.size() != bidders * goods) {
      fail("profile has " + std::to_string(flat.size()) + " entries, expected " + std::to_string(bidders * goods));
    }
    Matrix m(bidders, goods);
    std::copy(flat.begin(), flat.end(), m.data().begin());
    return m;
  }
  return parse_matrix(text);
}

}  // namespace mmr::io
