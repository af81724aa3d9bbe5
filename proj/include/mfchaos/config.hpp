#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mfchaos/errors.hpp"

namespace mfchaos {

/// Validated flat key-value configuration. All schema keys are present with
/// canonical formatting, so two configs are identical iff their maps are.
struct RunConfig {
  std::map<std::string, std::string> kv;

  bool operator==(const RunConfig&) const = default;

  const std::string& str(const std::string& key) const { return kv.at(key); }
  double real(const std::string& key) const { return std::stod(kv.at(key)); }
  long integer(const std::string& key) const { return std::stol(kv.at(key)); }
  bool flag(const std::string& key) const { return kv.at(key) == "true"; }

  std::vector<double> real_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(kv.at(key));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(std::stod(item));
    return out;
  }
  std::vector<std::uint64_t> int_list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    std::stringstream ss(kv.at(key));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(std::stoull(item));
    return out;
  }
};

namespace detail {

enum class KeyType { Real, Integer, Boolean, Keyword, RealList, IntegerList, Text };

struct KeySpec {
  const char* key;
  KeyType type;
  const char* def;
  const char* constraint;  // human-readable, used in errors
  std::function<bool(double)> check;  // numeric constraint, when applicable
  std::vector<std::string> keywords;  // allowed values for Keyword type
};

inline const std::vector<KeySpec>& config_schema() {
  static const auto positive = [](double v) { return v > 0.0; };
  static const auto nonneg = [](double v) { return v >= 0.0; };
  static const auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };
  static const std::vector<KeySpec> schema = {
      {"experiment", KeyType::Keyword, "check-stability", "known subcommand", {},
       {"check-stability", "solve-fp", "simulate-particles", "converge-n", "converge-eps",
        "uniqueness", "stability-sweep", "smoothing"}},
      {"driver.kind", KeyType::Keyword, "linear", "one of linear|monotone-perturbed|constant",
       {}, {"linear", "monotone-perturbed", "constant"}},
      {"driver.a", KeyType::Real, "1", "must be > 0", positive, {}},
      {"driver.b", KeyType::Real, "3", "must be > 0", positive, {}},
      {"driver.amplitude", KeyType::Real, "0.1", "", {}, {}},
      {"driver.frequency", KeyType::Real, "1", "", {}, {}},
      {"driver.sigma", KeyType::Real, "1", "must be > 0", positive, {}},
      {"driver.root_tolerance", KeyType::Real, "1e-12", "must be > 0", positive, {}},
      {"driver.bracket_halfwidth", KeyType::Real, "1", "must be > 0", positive, {}},
      {"kernel.shape", KeyType::Keyword, "bump", "one of bump|quartic", {}, {"bump", "quartic"}},
      {"kernel.epsilon", KeyType::Real, "0.2", "must be > 0", positive, {}},
      {"grid.x_min", KeyType::Real, "-12", "", {}, {}},
      {"grid.x_max", KeyType::Real, "12", "", {}, {}},
      {"grid.nx", KeyType::Integer, "1024", "must be >= 16", [](double v) { return v >= 16; }, {}},
      {"init.kind", KeyType::Keyword, "gaussian-peak",
       "one of gaussian|gaussian-peak|plateau|bump", {},
       {"gaussian", "gaussian-peak", "plateau", "bump"}},
      {"init.mean", KeyType::Real, "0", "", {}, {}},
      {"init.sd", KeyType::Real, "1", "must be > 0", positive, {}},
      {"init.peak", KeyType::Real, "0.4", "must be > 0", positive, {}},
      {"init.center", KeyType::Real, "0", "", {}, {}},
      {"init.width", KeyType::Real, "0.05", "must be > 0", positive, {}},
      {"fp.t_end", KeyType::Real, "0.5", "must be >= 0", nonneg, {}},
      {"fp.cfl_factor", KeyType::Real, "0.4", "must lie in (0,1)", unit_open, {}},
      {"fp.scheme", KeyType::Keyword, "euler", "one of euler|heun", {}, {"euler", "heun"}},
      {"fp.snapshot_times", KeyType::RealList, "", "", {}, {}},
      {"sde.dt", KeyType::Real, "0.005", "must be > 0", positive, {}},
      {"sde.t_end", KeyType::Real, "0.5", "must be >= 0", nonneg, {}},
      {"sde.n", KeyType::Integer, "1000", "must be >= 1", [](double v) { return v >= 1; }, {}},
      {"sde.density_eval", KeyType::Keyword, "auto", "one of auto|direct|grid", {},
       {"auto", "direct", "grid"}},
      {"m_inf", KeyType::Real, "0.4", "must be >= 0", nonneg, {}},
      {"seeds", KeyType::IntegerList, "1,2,3,4,5,6,7,8", "", {}, {}},
      {"sweep.n_list", KeyType::IntegerList, "200,800,3200", "", {}, {}},
      {"sweep.eps_list", KeyType::RealList, "0.4,0.2,0.1,0.05", "", {}, {}},
      {"sweep.b_list", KeyType::RealList, "1.0,1.9,2.0,2.1,3.0", "", {}, {}},
      {"sweep.refine_grid", KeyType::Boolean, "false", "", {}, {}},
      {"uniqueness.perturbation", KeyType::Keyword, "translate",
       "one of translate|sinusoidal", {}, {"translate", "sinusoidal"}},
      {"uniqueness.l2_size", KeyType::Real, "0.001", "must lie in (0, 1e-3]",
       [](double v) { return v > 0.0 && v <= 1e-3; }, {}},
      {"uniqueness.frequency", KeyType::Real, "0.7", "must be > 0", positive, {}},
      {"smoothing.spike_width", KeyType::Real, "0.05", "must be > 0", positive, {}},
      {"smoothing.window_start", KeyType::Real, "0.1", "must be > 0", positive, {}},
      {"smoothing.heat_control", KeyType::Boolean, "true", "", {}, {}},
      {"smoothing.control_sigma", KeyType::Real, "1", "must be > 0", positive, {}},
      {"out_dir", KeyType::Text, "out", "", {}, {}},
      {"threads", KeyType::Integer, "0", "must be >= 0", nonneg, {}},
  };
  return schema;
}

inline std::string canonical_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string canonicalize_value(const KeySpec& spec, const std::string& raw) {
  const std::string v = trim(raw);
  auto fail = [&](const std::string& why) -> ValidationError {
    return ValidationError(spec.key, why);
  };
  switch (spec.type) {
    case KeyType::Real: {
      double d;
      try {
        std::size_t pos = 0;
        d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
      } catch (...) {
        throw fail("not a number: '" + v + "'");
      }
      if (spec.check && !spec.check(d)) throw fail(spec.constraint);
      return canonical_double(d);
    }
    case KeyType::Integer: {
      long n;
      try {
        std::size_t pos = 0;
        n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
      } catch (...) {
        throw fail("not an integer: '" + v + "'");
      }
      if (spec.check && !spec.check(double(n))) throw fail(spec.constraint);
      return std::to_string(n);
    }
    case KeyType::Boolean: {
      if (v == "true" || v == "1" || v == "yes") return "true";
      if (v == "false" || v == "0" || v == "no") return "false";
      throw fail("not a boolean: '" + v + "'");
    }
    case KeyType::Keyword: {
      for (const std::string& k : spec.keywords)
        if (v == k) return v;
      throw fail(std::string(spec.constraint) + ", got '" + v + "'");
    }
    case KeyType::RealList:
    case KeyType::IntegerList: {
      if (v.empty()) return "";
      std::ostringstream out;
      std::stringstream ss(v);
      std::string item;
      bool first = true;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw fail("empty list element");
        try {
          std::size_t pos = 0;
          if (spec.type == KeyType::RealList) {
            const double d = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument("");
            if (!first) out << ',';
            out << canonical_double(d);
          } else {
            const long n = std::stol(item, &pos);
            if (pos != item.size()) throw std::invalid_argument("");
            if (!first) out << ',';
            out << n;
          }
        } catch (const ValidationError&) {
          throw;
        } catch (...) {
          throw fail("bad list element: '" + item + "'");
        }
        first = false;
      }
      return out.str();
    }
    case KeyType::Text:
      return v;
  }
  throw fail("unhandled key type");
}

}  // namespace detail

/// Parses flat `key = value` text with optional [section] headers (keys
/// inside a section are prefixed with "section."), # comments, and
/// comma-separated lists. Unknown keys are rejected with their path;
/// defaults are filled for everything left unset.
inline RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> seen;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("unterminated section header", lineno, 1);
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno, int(line.find(t[0])) + 1);
    std::string key = detail::trim(t.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", lineno, 1);
    if (!section.empty()) key = section + "." + key;
    seen[key] = detail::trim(t.substr(eq + 1));
  }

  RunConfig cfg;
  for (const auto& spec : detail::config_schema()) {
    auto it = seen.find(spec.key);
    const std::string raw = (it != seen.end()) ? it->second : std::string(spec.def);
    cfg.kv[spec.key] = detail::canonicalize_value(spec, raw);
    if (it != seen.end()) seen.erase(it);
  }
  if (!seen.empty()) throw ValidationError(seen.begin()->first, "unknown key");
  return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string(), "config file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical echo of the effective configuration; re-parsing it yields an
/// identical RunConfig.
inline std::string effective_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : cfg.kv) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace mfchaos
