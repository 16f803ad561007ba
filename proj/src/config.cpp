#include "iterblue/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "iterblue/linalg.hpp"

namespace iterblue {

namespace {

constexpr double kDefaultGridMin = 1e-8;
constexpr double kDefaultGridMax = 1e-3;
constexpr std::size_t kDefaultPointsPerDecade = 6;

std::vector<double> log_grid(double lo, double hi, std::size_t per_decade,
                             std::size_t line) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw ParseError("grid bounds must satisfy 0 < grid_min < grid_max", line,
                     "grid_min");
  }
  if (per_decade == 0) {
    throw ParseError("grid_points_per_decade must be >= 1", line,
                     "grid_points_per_decade");
  }
  const double lo_exp = std::log10(lo);
  const double hi_exp = std::log10(hi);
  const auto steps = static_cast<std::size_t>(
      std::floor((hi_exp - lo_exp) * static_cast<double>(per_decade) + 1e-9));
  std::vector<double> grid;
  grid.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    grid.push_back(std::pow(
        10.0, lo_exp + static_cast<double>(k) / static_cast<double>(per_decade)));
  }
  return grid;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view token, std::size_t line,
                    const std::string& key) {
  token = trim(token);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("malformed number '" + std::string(token) + "' for key " +
                         key,
                     line, key);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value for key " + key, line, key);
  }
  return value;
}

std::uint64_t parse_count(std::string_view token, std::size_t line,
                          const std::string& key) {
  token = trim(token);
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("malformed count '" + std::string(token) + "' for key " +
                         key,
                     line, key);
  }
  return value;
}

// Splits `body` on commas that sit at bracket depth zero.
std::vector<std::string_view> split_top_level(std::string_view body) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(body.substr(start));
  return parts;
}

std::string_view strip_brackets(std::string_view s, char open, char close,
                                std::size_t line, const std::string& key) {
  s = trim(s);
  if (s.size() < 2 || s.front() != open || s.back() != close) {
    throw ParseError("expected '" + std::string(1, open) + "..." +
                         std::string(1, close) + "' value for key " + key,
                     line, key);
  }
  return trim(s.substr(1, s.size() - 2));
}

Vector parse_vector(std::string_view text, std::size_t line,
                    const std::string& key) {
  const std::string_view body = strip_brackets(text, '[', ']', line, key);
  if (body.empty()) {
    throw ParseError("empty list for key " + key, line, key);
  }
  std::vector<double> entries;
  for (std::string_view part : split_top_level(body)) {
    entries.push_back(parse_number(part, line, key));
  }
  return Vector::from(std::move(entries));
}

Matrix parse_matrix(std::string_view text, std::size_t line,
                    const std::string& key) {
  text = trim(text);
  if (text.rfind("diag", 0) == 0) {
    std::string_view body =
        strip_brackets(text.substr(4), '(', ')', line, key);
    if (!body.empty() && body.front() == '[') {
      return Matrix::diagonal(parse_vector(body, line, key));
    }
    if (body.empty()) {
      throw ParseError("empty diag(...) for key " + key, line, key);
    }
    std::vector<double> entries;
    for (std::string_view part : split_top_level(body)) {
      entries.push_back(parse_number(part, line, key));
    }
    return Matrix::diagonal(Vector::from(std::move(entries)));
  }

  const std::string_view body = strip_brackets(text, '[', ']', line, key);
  std::vector<std::vector<double>> rows;
  for (std::string_view row_text : split_top_level(body)) {
    const Vector row = parse_vector(row_text, line, key);
    rows.push_back(row.entries());
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw ParseError("ragged matrix rows for key " + key, line, key);
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Matrix::from(rows.size(), cols, std::move(entries));
}

std::vector<std::string> parse_words(std::string_view text, std::size_t line,
                                     const std::string& key) {
  const std::string_view body = strip_brackets(text, '[', ']', line, key);
  if (body.empty()) {
    throw ParseError("empty list for key " + key, line, key);
  }
  std::vector<std::string> words;
  for (std::string_view part : split_top_level(body)) {
    part = trim(part);
    if (part.empty() ||
        !std::all_of(part.begin(), part.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_';
        })) {
      throw ParseError("malformed identifier '" + std::string(part) +
                           "' for key " + key,
                       line, key);
    }
    words.emplace_back(part);
  }
  return words;
}

struct RawEntry {
  std::string value;
  std::size_t line;
};

std::map<std::string, RawEntry> tokenize(std::string_view text) {
  std::map<std::string, RawEntry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, "");
    }
    const std::string key{trim(line.substr(0, eq))};
    if (key.empty() ||
        !std::all_of(key.begin(), key.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_';
        })) {
      throw ParseError("malformed key '" + key + "'", line_no, key);
    }
    if (entries.count(key)) {
      throw ParseError("duplicate key '" + key + "'", line_no, key);
    }
    entries[key] = RawEntry{std::string(trim(line.substr(eq + 1))), line_no};
  }
  return entries;
}

}  // namespace

SweepConfig parse_config(std::string_view text) {
  std::map<std::string, RawEntry> raw = tokenize(text);

  SweepConfig cfg;
  cfg.sigma_grid =
      log_grid(kDefaultGridMin, kDefaultGridMax, kDefaultPointsPerDecade, 0);

  auto take = [&](const char* key) -> const RawEntry* {
    const auto it = raw.find(key);
    if (it == raw.end()) return nullptr;
    return &it->second;
  };
  auto line_of = [&](const char* key) -> std::size_t {
    const auto it = raw.find(key);
    return it == raw.end() ? 0 : it->second.line;
  };

  if (const auto* e = take("n_h")) cfg.base.n_h = parse_count(e->value, e->line, "n_h");
  if (const auto* e = take("n_x")) cfg.base.n_x = parse_count(e->value, e->line, "n_x");
  if (const auto* e = take("x_true"))
    cfg.base.x_true = parse_vector(e->value, e->line, "x_true");
  if (const auto* e = take("h_mean"))
    cfg.base.h_mean = parse_vector(e->value, e->line, "h_mean");
  if (const auto* e = take("c_hh"))
    cfg.base.c_hh = parse_matrix(e->value, e->line, "c_hh");
  if (const auto* e = take("c_ee"))
    cfg.base.c_ee = parse_matrix(e->value, e->line, "c_ee");
  if (const auto* e = take("sigma_n_sq"))
    cfg.base.sigma_n_sq = parse_number(e->value, e->line, "sigma_n_sq");
  if (const auto* e = take("seed"))
    cfg.base.seed = parse_count(e->value, e->line, "seed");
  if (const auto* e = take("trials")) {
    cfg.trials = parse_count(e->value, e->line, "trials");
    if (cfg.trials == 0) {
      throw ParseError("trials must be >= 1", e->line, "trials");
    }
  }
  if (const auto* e = take("n_iter"))
    cfg.n_iter = parse_count(e->value, e->line, "n_iter");
  if (const auto* e = take("stop_tol")) {
    cfg.stop_tol = parse_number(e->value, e->line, "stop_tol");
    if (cfg.stop_tol < 0.0) {
      throw ParseError("stop_tol must be >= 0", e->line, "stop_tol");
    }
  }
  if (const auto* e = take("estimators"))
    cfg.estimators = parse_words(e->value, e->line, "estimators");

  const bool explicit_grid = raw.count("sigma_grid") > 0;
  const bool generated_grid = raw.count("grid_min") || raw.count("grid_max") ||
                              raw.count("grid_points_per_decade");
  if (explicit_grid && generated_grid) {
    throw ParseError("sigma_grid and grid_min/grid_max/grid_points_per_decade "
                     "are mutually exclusive",
                     line_of("sigma_grid"), "sigma_grid");
  }
  if (explicit_grid) {
    const auto* e = take("sigma_grid");
    cfg.sigma_grid = parse_vector(e->value, e->line, "sigma_grid").entries();
  } else if (generated_grid) {
    double lo = kDefaultGridMin;
    double hi = kDefaultGridMax;
    std::size_t per_decade = kDefaultPointsPerDecade;
    if (const auto* e = take("grid_min")) lo = parse_number(e->value, e->line, "grid_min");
    if (const auto* e = take("grid_max")) hi = parse_number(e->value, e->line, "grid_max");
    if (const auto* e = take("grid_points_per_decade"))
      per_decade = parse_count(e->value, e->line, "grid_points_per_decade");
    const std::size_t blame = std::max(
        {line_of("grid_min"), line_of("grid_max"), line_of("grid_points_per_decade")});
    cfg.sigma_grid = log_grid(lo, hi, per_decade, blame);
  }

  static const char* const known[] = {
      "n_h",       "n_x",        "x_true",     "h_mean",
      "c_hh",      "c_ee",       "sigma_n_sq", "seed",
      "trials",    "n_iter",     "stop_tol",   "estimators",
      "sigma_grid", "grid_min",  "grid_max",   "grid_points_per_decade"};
  for (const auto& [key, entry] : raw) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return key == k;
        }) == std::end(known)) {
      throw ParseError("unknown key '" + key + "'", entry.line, key);
    }
  }

  // cross-key invariants, blamed on the most relevant present key
  auto blame = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (raw.count(k)) return std::make_pair(line_of(k), std::string(k));
    }
    return std::make_pair(std::size_t{0}, std::string(*keys.begin()));
  };
  auto check = [&](bool ok, const std::string& message,
                   std::initializer_list<const char*> keys) {
    if (!ok) {
      const auto [line, key] = blame(keys);
      throw ParseError(message, line, key);
    }
  };

  check(cfg.base.n_h >= 2, "n_h must be >= 2", {"n_h"});
  check(cfg.base.n_x >= 1, "n_x must be >= 1", {"n_x"});
  check(cfg.base.x_true.size() == cfg.base.n_x,
        "x_true length (" + std::to_string(cfg.base.x_true.size()) +
            ") must equal n_x (" + std::to_string(cfg.base.n_x) + ")",
        {"x_true", "n_x"});
  check(cfg.base.h_mean.size() == cfg.base.n_h,
        "h_mean length must equal n_h", {"h_mean", "n_h"});
  check(cfg.base.c_hh.rows() == cfg.base.n_h &&
            cfg.base.c_hh.cols() == cfg.base.n_h,
        "c_hh must be n_h x n_h", {"c_hh", "n_h"});
  check(cfg.base.c_ee.rows() == cfg.base.n_h &&
            cfg.base.c_ee.cols() == cfg.base.n_h,
        "c_ee must be n_h x n_h", {"c_ee", "n_h"});
  check(cfg.base.sigma_n_sq >= 0.0, "sigma_n_sq must be >= 0", {"sigma_n_sq"});
  for (std::size_t i = 0; i < cfg.sigma_grid.size(); ++i) {
    check(cfg.sigma_grid[i] > 0.0, "sigma_grid values must be positive",
          {"sigma_grid", "grid_min"});
    check(i == 0 || cfg.sigma_grid[i] > cfg.sigma_grid[i - 1],
          "sigma_grid must be strictly increasing", {"sigma_grid", "grid_min"});
  }
  for (const auto& name : cfg.estimators) {
    check(default_registry().count(name) > 0,
          "unknown estimator '" + name + "'", {"estimators"});
  }

  try {
    if (!is_symmetric(cfg.base.c_hh, kSymmetryTol)) {
      throw ContractError("not symmetric within tolerance");
    }
    require_psd(cfg.base.c_hh, "c_hh");
  } catch (const ContractError& err) {
    const auto [line, key] = blame({"c_hh"});
    throw ParseError(std::string("c_hh: ") + err.what(), line, key);
  }
  try {
    if (!is_symmetric(cfg.base.c_ee, kSymmetryTol)) {
      throw ContractError("not symmetric within tolerance");
    }
    require_psd(cfg.base.c_ee, "c_ee");
  } catch (const ContractError& err) {
    const auto [line, key] = blame({"c_ee"});
    throw ParseError(std::string("c_ee: ") + err.what(), line, key);
  }

  return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed reading config file: " + path);
  }
  return parse_config(buf.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                       std::chars_format::scientific, 16);
  return std::string(buf, ptr);
}

namespace {

std::string format_count(std::uint64_t v) { return std::to_string(v); }

std::string format_vector(const Vector& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string format_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

bool is_diagonal(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

std::string format_matrix(const Matrix& m) {
  if (is_diagonal(m)) {
    std::string out = "diag(";
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i) out += ", ";
      out += format_double(m(i, i));
    }
    return out + ")";
  }
  std::string out = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      out += format_double(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

std::string format_words(const std::vector<std::string>& words) {
  std::string out = "[";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ", ";
    out += words[i];
  }
  return out + "]";
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_meta(
    const SweepConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("n_h", format_count(cfg.base.n_h));
  kv.emplace_back("n_x", format_count(cfg.base.n_x));
  kv.emplace_back("x_true", format_vector(cfg.base.x_true));
  kv.emplace_back("h_mean", format_vector(cfg.base.h_mean));
  kv.emplace_back("c_hh", format_matrix(cfg.base.c_hh));
  kv.emplace_back("c_ee", format_matrix(cfg.base.c_ee));
  kv.emplace_back("sigma_n_sq", format_double(cfg.base.sigma_n_sq));
  kv.emplace_back("sigma_grid", format_list(cfg.sigma_grid));
  kv.emplace_back("trials", format_count(cfg.trials));
  kv.emplace_back("n_iter", format_count(cfg.n_iter));
  kv.emplace_back("stop_tol", format_double(cfg.stop_tol));
  kv.emplace_back("seed", format_count(cfg.base.seed));
  kv.emplace_back("estimators", format_words(cfg.estimators));
  return kv;
}

std::string serialize_config(const SweepConfig& cfg) {
  std::string out;
  for (const auto& [key, value] : config_meta(cfg)) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  }
  return out;
}

}  // namespace iterblue
