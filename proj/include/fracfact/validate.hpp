#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"

namespace fracfact {

// Cell grid as extracted by the response parser: strings, trimmed, possibly
// empty; header labels when a header row was present.
struct RawTable {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header_labels;
  std::vector<std::string> repair_log;
};

enum class ComplianceClass {
  Compliant,
  Refusal,
  WrongDimensions,
  MissingEntries,
  InvalidLevel,
};

inline const char* to_string(ComplianceClass c) {
  switch (c) {
    case ComplianceClass::Compliant: return "compliant";
    case ComplianceClass::Refusal: return "refusal";
    case ComplianceClass::WrongDimensions: return "wrong-dimensions";
    case ComplianceClass::MissingEntries: return "missing-entries";
    case ComplianceClass::InvalidLevel: return "invalid-level";
  }
  return "?";
}

inline std::optional<ComplianceClass> compliance_class_from_string(
    std::string_view s) {
  for (ComplianceClass c :
       {ComplianceClass::Compliant, ComplianceClass::Refusal,
        ComplianceClass::WrongDimensions, ComplianceClass::MissingEntries,
        ComplianceClass::InvalidLevel})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

struct ComplianceReport {
  ComplianceClass cls = ComplianceClass::WrongDimensions;
  std::string detail;
  std::vector<std::string> repair_log;
};

struct ValidationResult {
  ComplianceReport report;
  std::optional<DesignTable> table;  // present iff compliant
};

/// Classifies a parsed table against the requested size. Compliant means
/// exactly requested_n x requested_m with every cell in {-1, +1}; otherwise
/// the most specific failure class wins (shape, then missing cells, then bad
/// levels). Header labels that deviate from A, B, ... are logged but do not
/// affect compliance.
inline ValidationResult validate_table(const RawTable& candidate,
                                       int requested_m, int requested_n) {
  ValidationResult out;
  out.report.repair_log = candidate.repair_log;

  int n = static_cast<int>(candidate.cells.size());
  bool rectangular = true;
  for (const auto& row : candidate.cells)
    if (static_cast<int>(row.size()) != requested_m) rectangular = false;
  if (n != requested_n || !rectangular) {
    int cols = candidate.cells.empty()
                   ? 0
                   : static_cast<int>(candidate.cells[0].size());
    out.report.cls = ComplianceClass::WrongDimensions;
    out.report.detail = "expected " + std::to_string(requested_n) + "x" +
                        std::to_string(requested_m) + ", got " +
                        std::to_string(n) + "x" + std::to_string(cols) +
                        (rectangular ? "" : " (ragged)");
    return out;
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < requested_m; ++j)
      if (candidate.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(
              j)].empty()) {
        out.report.cls = ComplianceClass::MissingEntries;
        out.report.detail = "empty cell at run " + std::to_string(i + 1) +
                            ", factor " + std::to_string(j + 1);
        return out;
      }

  std::vector<std::vector<int>> levels(
      static_cast<std::size_t>(n),
      std::vector<int>(static_cast<std::size_t>(requested_m)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < requested_m; ++j) {
      const std::string& cell =
          candidate.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      int value;
      if (cell == "-1")
        value = -1;
      else if (cell == "1" || cell == "+1")
        value = 1;
      else {
        out.report.cls = ComplianceClass::InvalidLevel;
        out.report.detail = "cell \"" + cell + "\" at run " +
                            std::to_string(i + 1) + ", factor " +
                            std::to_string(j + 1) + " is not -1 or 1";
        return out;
      }
      levels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = value;
    }

  // Header deviations are informational only.
  auto expected = default_factor_labels(requested_m);
  if (!candidate.header_labels.empty() && candidate.header_labels != expected)
    out.report.repair_log.push_back("header labels deviate from A, B, ...");

  out.report.cls = ComplianceClass::Compliant;
  out.report.detail = "complete " + std::to_string(requested_n) + "x" +
                      std::to_string(requested_m) + " table";
  out.table = DesignTable::make(std::move(levels), std::move(expected));
  return out;
}

}  // namespace fracfact
