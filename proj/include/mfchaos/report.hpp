#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfchaos/errors.hpp"
#include "mfchaos/grid.hpp"

namespace mfchaos {

enum class VerdictStatus { Pass, Fail, NotApplicable };

inline const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Pass:
      return "pass";
    case VerdictStatus::Fail:
      return "fail";
    default:
      return "not-applicable";
  }
}

struct Verdict {
  std::string id;
  VerdictStatus status = VerdictStatus::NotApplicable;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Column {
  std::string name;
  std::vector<double> values;
};

struct Table {
  std::string name;
  std::vector<Column> columns;

  const Column& column(const std::string& name) const {
    for (const Column& c : columns)
      if (c.name == name) return c;
    throw Error("table '" + this->name + "' has no column '" + name + "'");
  }
};

enum class ExperimentKind { ConvergeN, ConvergeEps, Uniqueness, StabilitySweep, Smoothing };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ConvergeN:
      return "converge-n";
    case ExperimentKind::ConvergeEps:
      return "converge-eps";
    case ExperimentKind::Uniqueness:
      return "uniqueness";
    case ExperimentKind::StabilitySweep:
      return "stability-sweep";
    default:
      return "smoothing";
  }
}

/// Self-contained experiment result: full parameter echo, columnar tables,
/// and pass/fail verdicts whose measured values appear in the tables.
struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::ConvergeN;
  std::string label;  // defaults to the kind name; CLI subcommands may override
  std::map<std::string, std::string> parameters;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;
  std::vector<std::uint64_t> seeds;

  const std::string kind_name() const { return label.empty() ? to_string(kind) : label; }

  bool all_pass() const {
    for (const Verdict& v : verdicts)
      if (v.status == VerdictStatus::Fail) return false;
    return true;
  }

  const Table& table(const std::string& name) const {
    for (const Table& t : tables)
      if (t.name == name) return t;
    throw Error("report has no table '" + name + "'");
  }
};

/// Mirrors the verdicts into a table so every measured value appears in the
/// report's tables (reports stay self-contained for re-plotting).
inline void append_verdict_table(ExperimentReport& r) {
  Table t{"verdict_measures",
          {{"verdict_index", {}}, {"measured", {}}, {"threshold", {}}, {"passed", {}}}};
  for (std::size_t k = 0; k < r.verdicts.size(); ++k) {
    const Verdict& v = r.verdicts[k];
    t.columns[0].values.push_back(double(k));
    t.columns[1].values.push_back(v.measured);
    t.columns[2].values.push_back(v.threshold);
    t.columns[3].values.push_back(v.status == VerdictStatus::Pass ? 1.0
                                  : v.status == VerdictStatus::Fail ? 0.0 : -1.0);
  }
  r.tables.push_back(std::move(t));
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind_name();
  j["parameters"] = r.parameters;
  j["seeds"] = r.seeds;
  nlohmann::json tables = nlohmann::json::object();
  for (const Table& t : r.tables) {
    nlohmann::json cols = nlohmann::json::object();
    for (const Column& c : t.columns) cols[c.name] = c.values;
    tables[t.name] = cols;
  }
  j["tables"] = tables;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const Verdict& v : r.verdicts) {
    verdicts.push_back({{"id", v.id},
                        {"status", to_string(v.status)},
                        {"measured", v.measured},
                        {"threshold", v.threshold},
                        {"detail", v.detail}});
  }
  j["verdicts"] = verdicts;
  return j;
}

inline std::string table_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) os << ',';
    os << t.columns[c].name;
  }
  os << '\n';
  std::size_t rows = 0;
  for (const Column& c : t.columns) rows = std::max(rows, c.values.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (c) os << ',';
      if (r < t.columns[c].values.size()) detail::print_csv_double(os, t.columns[c].values[r]);
    }
    os << '\n';
  }
  return os.str();
}

/// FNV-1a hash of the canonical parameter echo; keys report files to the
/// configuration that produced them.
inline std::string config_hash(const std::map<std::string, std::string>& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : params) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Writes <kind>_<stamp>_<hash>.json plus one CSV per table. The stamp
/// appears only in file names; contents are a pure function of the inputs.
inline std::vector<std::filesystem::path> write_report(const ExperimentReport& r,
                                                       const std::filesystem::path& dir,
                                                       const std::string& stamp) {
  std::filesystem::create_directories(dir);
  const std::string base = r.kind_name() + "_" + stamp + "_" + config_hash(r.parameters);
  std::vector<std::filesystem::path> written;
  {
    const auto path = dir / (base + ".json");
    std::ofstream os(path);
    os << to_json(r).dump(2) << '\n';
    written.push_back(path);
  }
  for (const Table& t : r.tables) {
    const auto path = dir / (base + "_" + t.name + ".csv");
    std::ofstream os(path);
    os << table_csv(t);
    written.push_back(path);
  }
  return written;
}

}  // namespace mfchaos
