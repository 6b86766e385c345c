#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "supnc/errors.hpp"

// Minimal CSV emission and parsing: comma separated, LF line endings, header
// row, no quoting (no emitted cell ever contains a comma or a newline).
// Floats carry 17 significant digits so a parse/re-emit cycle is
// byte-identical and every double survives the trip exactly.
namespace supnc::csv {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_int(long long v) { return std::to_string(v); }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void require_rectangular() const {
    for (const auto& row : rows) {
      if (row.size() != header.size()) {
        throw invalid_argument("csv: ragged row (" + std::to_string(row.size()) + " cells, " +
                               std::to_string(header.size()) + " columns)");
      }
    }
  }
};

inline void write(std::ostream& out, const Table& t) {
  t.require_rectangular();
  auto emit_line = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out.put(',');
      out << cells[i];
    }
    out.put('\n');
  };
  emit_line(t.header);
  for (const auto& row : t.rows) emit_line(row);
}

inline std::string to_string(const Table& t) {
  std::string s;
  auto append_line = [&s](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) s.push_back(',');
      s += cells[i];
    }
    s.push_back('\n');
  };
  append_line(t.header);
  for (const auto& row : t.rows) append_line(row);
  return s;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline Table parse(std::istream& in) {
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      throw invalid_argument("csv: CR line ending");
    }
    if (first) {
      t.header = split_line(line);
      first = false;
    } else {
      t.rows.push_back(split_line(line));
    }
  }
  if (first) throw invalid_argument("csv: empty input");
  t.require_rectangular();
  return t;
}

}  // namespace supnc::csv
