#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"

namespace fracfact {

namespace detail {

inline std::string trim_copy(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim_copy(line.substr(start)));
      break;
    }
    fields.push_back(trim_copy(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

inline bool equals_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

}  // namespace detail

/// Serializes a design in the CSV dialect used throughout: header row
/// "Run,A,B,...", data rows "i,-1,...,1". With `row_terminators`, every row
/// additionally ends with the literal two-character terminator '\\'.
/// Output is byte-deterministic.
inline std::string emit_design_csv(const DesignTable& design,
                                   bool row_terminators = true) {
  std::ostringstream out;
  const char* tail = row_terminators ? "\\\\\n" : "\n";
  out << "Run";
  for (const auto& label : design.factor_labels) out << ',' << label;
  out << tail;
  for (int i = 0; i < design.n(); ++i) {
    out << design.run_ids[static_cast<std::size_t>(i)];
    for (int level : design.rows[static_cast<std::size_t>(i)])
      out << ',' << level;
    out << tail;
  }
  return out.str();
}

/// Reads a design from CSV text; both the terminator dialect and plain CSV
/// are accepted. Strict about levels: every cell must be -1 or 1.
inline DesignTable parse_design_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = detail::trim_copy(text.substr(start, nl - start));
    while (line.size() >= 2 && line.compare(line.size() - 2, 2, "\\\\") == 0)
      line = detail::trim_copy(std::string_view(line).substr(0, line.size() - 2));
    if (!line.empty()) rows.push_back(detail::split_fields(line));
    if (nl == text.size()) break;
    start = nl + 1;
  }
  if (rows.empty()) throw DataError("design file: no rows");

  std::vector<std::string> labels;
  if (detail::equals_ci(rows[0][0], "run")) {
    labels.assign(rows[0].begin() + 1, rows[0].end());
    rows.erase(rows.begin());
    if (rows.empty()) throw DataError("design file: header but no runs");
  }

  // A leading run-number column is stripped when it is the 1..n sequence or
  // when a header named it.
  bool has_run_column = !labels.empty();
  if (!has_run_column) {
    has_run_column = true;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].empty() || rows[i][0] != std::to_string(i + 1)) {
        has_run_column = false;
        break;
      }
  }

  std::vector<std::vector<int>> cells;
  std::vector<int> run_ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& fields = rows[i];
    std::size_t first = has_run_column ? 1 : 0;
    if (fields.size() <= first)
      throw DataError("design file: empty run on line " + std::to_string(i + 1));
    if (has_run_column) {
      try {
        run_ids.push_back(std::stoi(fields[0]));
      } catch (const std::exception&) {
        throw DataError("design file: bad run id \"" + fields[0] + "\"");
      }
    }
    std::vector<int> run;
    run.reserve(fields.size() - first);
    for (std::size_t j = first; j < fields.size(); ++j) {
      const std::string& cell = fields[j];
      if (cell == "-1")
        run.push_back(-1);
      else if (cell == "1" || cell == "+1")
        run.push_back(1);
      else
        throw DataError("design file: cell \"" + cell + "\" is not -1 or 1");
    }
    cells.push_back(std::move(run));
  }
  return DesignTable::make(std::move(cells), std::move(labels),
                           std::move(run_ids));
}

inline DesignTable read_design_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open design file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design_csv(buf.str());
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace fracfact
