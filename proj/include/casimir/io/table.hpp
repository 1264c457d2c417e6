/**
 * @file table.hpp
 * @brief Delimited-text result tables with a key-value metadata header.
 *
 * Layout:
 *   # key: value            (metadata, one per line; "generated" is the only time-dependent line)
 *   col_a<TAB>col_b ...     (header row, names carry units)
 *   1.00000000<TAB>...      (rows, 9 significant digits; a trailing "status" column may hold ok/failed)
 *   #! message              (note attached to the preceding row)
 */
#ifndef CASIMIR_IO_TABLE_HPP
#define CASIMIR_IO_TABLE_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"

namespace casimir::io {

inline constexpr const char* table_schema = "casimir-table/1";

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> status;  // per row; empty means no status column
  std::vector<std::string> notes;   // per row; empty string for none

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& kv : metadata)
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    metadata.emplace_back(key, value);
  }

  std::string meta(const std::string& key) const {
    for (const auto& kv : metadata)
      if (kv.first == key) return kv.second;
    return {};
  }

  void add_row(std::vector<double> row, std::string row_status = {}, std::string note = {}) {
    if (row.size() != columns.size()) throw DomainError("Table: row width does not match the header");
    rows.push_back(std::move(row));
    status.push_back(std::move(row_status));
    notes.push_back(std::move(note));
  }

  bool has_status() const {
    for (const auto& s : status)
      if (!s.empty()) return true;
    return false;
  }
};

/// 9 significant digits; nan/inf spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct EmitOptions {
  bool timestamp = true;
};

inline void write_table(std::ostream& os, const Table& t, const EmitOptions& opt = {}) {
  os << "# schema: " << table_schema << "\n";
  for (const auto& [k, v] : t.metadata)
    if (k != "schema" && k != "generated") os << "# " << k << ": " << v << "\n";
  if (opt.timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "# generated: " << buf << "\n";
  }
  const bool st = t.has_status();
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "\t" : "") << t.columns[c];
  if (st) os << (t.columns.empty() ? "" : "\t") << "status";
  os << "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) os << (c ? "\t" : "") << format_number(t.rows[r][c]);
    if (st) os << "\t" << (t.status[r].empty() ? "ok" : t.status[r]);
    os << "\n";
    if (!t.notes[r].empty()) os << "#! " << t.notes[r] << "\n";
  }
}

/// Write to path, or to stdout when path is empty or "-".
inline void emit_table(const Table& t, const std::string& path, const EmitOptions& opt = {}) {
  if (path.empty() || path == "-") {
    write_table(std::cout, t, opt);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write table to '" + path + "'");
  write_table(out, t, opt);
  if (!out) throw ValidationError("error while writing '" + path + "'");
}

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  bool header = false, st = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#!", 0) == 0) {
      if (t.rows.empty()) throw ValidationError("table: note before the first row");
      t.notes.back() = line.size() > 3 ? line.substr(3) : "";
      continue;
    }
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(1, colon - 1), val = line.substr(colon + 1);
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(' '), b = s.find_last_not_of(' ');
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      t.metadata.emplace_back(trim(key), trim(val));
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ls, c, '\t');) cells.push_back(c);
    if (!header) {
      header = true;
      st = !cells.empty() && cells.back() == "status";
      if (st) cells.pop_back();
      t.columns = cells;
      continue;
    }
    if (cells.size() != t.columns.size() + (st ? 1 : 0)) throw ValidationError("table: row width does not match the header");
    std::vector<double> row;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& s = cells[c];
      if (s == "nan") row.push_back(std::numeric_limits<double>::quiet_NaN());
      else if (s == "inf") row.push_back(std::numeric_limits<double>::infinity());
      else if (s == "-inf") row.push_back(-std::numeric_limits<double>::infinity());
      else {
        try {
          row.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw ValidationError("table: invalid number '" + s + "'");
        }
      }
    }
    t.rows.push_back(std::move(row));
    t.status.push_back(st ? (cells.back() == "ok" ? "" : cells.back()) : "");
    t.notes.emplace_back();
  }
  return t;
}

inline Table read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open table '" + path + "'");
  return read_table(in);
}

}  // namespace casimir::io

#endif
