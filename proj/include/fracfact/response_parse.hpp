#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "fracfact/csv.hpp"
#include "fracfact/validate.hpp"

namespace fracfact {

// Outcome of parsing one raw model response.
struct ParseOutcome {
  enum class Kind { Table, Refusal, Unparseable };

  Kind kind = Kind::Unparseable;
  RawTable table;              // populated for Table
  std::string refusal_phrase;  // populated for Refusal
  std::string reason;          // populated for Unparseable
};

inline const char* to_string(ParseOutcome::Kind k) {
  switch (k) {
    case ParseOutcome::Kind::Table: return "table";
    case ParseOutcome::Kind::Refusal: return "refusal";
    case ParseOutcome::Kind::Unparseable: return "unparseable";
  }
  return "?";
}

/// Phrase list for the refusal scan; callers may extend or replace it.
inline const std::vector<std::string>& default_refusal_phrases() {
  static const std::vector<std::string> phrases = {
      "i'm sorry, but i cannot generate a valid design",
      "i cannot generate a valid design",
      "i am sorry, but i cannot generate",
  };
  return phrases;
}

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

// One row candidate: its text and whether it carried the '\\' terminator.
struct RowSegment {
  std::string text;
  bool terminated;
};

// Split on the literal two-character terminator and on line breaks.
inline std::vector<RowSegment> segment_rows(std::string_view raw) {
  std::vector<RowSegment> segments;
  std::string current;
  auto flush = [&](bool terminated) {
    std::string trimmed = trim_copy(current);
    if (!trimmed.empty()) segments.push_back({std::move(trimmed), terminated});
    current.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size() && raw[i + 1] == '\\') {
      flush(true);
      ++i;
    } else if (raw[i] == '\n') {
      flush(false);
    } else {
      current.push_back(raw[i]);
    }
  }
  flush(false);
  return segments;
}

inline bool number_like(const std::string& field) {
  std::size_t i = (field[0] == '+' || field[0] == '-') ? 1 : 0;
  bool digits = false, dot = false;
  for (; i < field.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(field[i]))) {
      digits = true;
    } else if (field[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digits;
}

// A field is table-like when it is a number, a short alphabetic label
// ("Run", "A", "AB"), or empty (doubled commas, repaired later). Prose
// fragments ("Okay, sure:") fail this.
inline bool cell_like(const std::string& field) {
  if (field.empty()) return true;
  if (number_like(field)) return true;
  return field.size() <= 3 &&
         std::all_of(field.begin(), field.end(), [](unsigned char c) {
           return std::isalpha(c) != 0;
         });
}

inline bool tabular(const RowSegment& seg) {
  if (seg.text.rfind("```", 0) == 0) return false;  // code fence line
  if (seg.text.find(',') == std::string::npos) return false;
  for (const auto& field : split_fields(seg.text))
    if (!cell_like(field)) return false;
  return true;
}

}  // namespace detail

/// Tolerant extraction of a design table from raw model output.
///
/// Pipeline: refusal scan; code fences and surrounding prose stripped; rows
/// split on the literal '\\' terminator and on line breaks; format repairs
/// applied and logged (whitespace trims, empty fields dropped from doubled
/// or trailing commas, rows accepted without their terminator); header row
/// and run-number column detected and removed. Repairs never invent cell
/// values: a cell either appears verbatim in the raw text or stays missing.
inline ParseOutcome parse_design_response(
    std::string_view raw, int m, [[maybe_unused]] int n,
    const std::vector<std::string>& refusal_phrases = default_refusal_phrases()) {
  ParseOutcome out;
  std::string lowered = detail::to_lower(raw);
  for (const auto& phrase : refusal_phrases) {
    if (lowered.find(detail::to_lower(phrase)) != std::string::npos) {
      out.kind = ParseOutcome::Kind::Refusal;
      out.refusal_phrase = phrase;
      return out;
    }
  }

  auto segments = detail::segment_rows(raw);

  // Isolate the table block: the longest contiguous run of tabular rows.
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < segments.size();) {
    if (!detail::tabular(segments[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < segments.size() && detail::tabular(segments[j])) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = i;
    }
    i = j;
  }
  if (best_len == 0) {
    out.reason = "no table rows found";
    return out;
  }

  RawTable table;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = best_start; i < best_start + best_len; ++i) {
    const auto& seg = segments[i];
    auto fields = detail::split_fields(seg.text);
    bool trimmed_any = false;
    {
      // split_fields already trims; detect whether trimming mattered.
      auto rough = seg.text;
      std::size_t commas =
          static_cast<std::size_t>(std::count(rough.begin(), rough.end(), ','));
      std::size_t joined = commas;  // separators
      for (const auto& f : fields) joined += f.size();
      trimmed_any = joined != rough.size();
    }
    if (trimmed_any)
      table.repair_log.push_back("row " + std::to_string(rows.size() + 1) +
                                 ": trimmed whitespace around fields");
    if (!seg.terminated)
      table.repair_log.push_back("row " + std::to_string(rows.size() + 1) +
                                 ": missing '\\\\' row terminator");
    rows.push_back(std::move(fields));
  }

  // Header row: "Run" plus factor labels, case-insensitive.
  bool header = !rows.empty() && !rows[0].empty() &&
                detail::equals_ci(rows[0][0], "run");
  if (header) {
    table.header_labels.assign(rows[0].begin() + 1, rows[0].end());
    while (!table.header_labels.empty() && table.header_labels.back().empty())
      table.header_labels.pop_back();
    rows.erase(rows.begin());
  }
  if (rows.empty()) {
    out.reason = "header row without data rows";
    return out;
  }

  // Run-number column: via the header, or a leading 1..n index sequence.
  bool run_column = header;
  if (!run_column) {
    run_column = true;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].empty() || rows[i][0] != std::to_string(i + 1)) {
        run_column = false;
        break;
      }
  }

  std::size_t header_offset = header ? 1 : 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& fields = rows[i];
    if (run_column && !fields.empty()) fields.erase(fields.begin());
    // Doubled or trailing commas leave empty fields; drop them only while
    // the row is too wide, so genuinely blank cells survive for the
    // compliance check.
    while (static_cast<int>(fields.size()) > m) {
      auto empty_it = std::find(fields.begin(), fields.end(), std::string());
      if (empty_it == fields.end()) break;
      bool trailing = empty_it + 1 == fields.end();
      table.repair_log.push_back(
          "row " + std::to_string(i + header_offset + 1) +
          ": dropped empty field from " + (trailing ? "trailing" : "doubled") +
          " comma");
      fields.erase(empty_it);
    }
  }

  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].size() != rows[0].size()) {
      out.reason = "rows are ragged after repair";
      return out;
    }

  table.cells = std::move(rows);
  out.kind = ParseOutcome::Kind::Table;
  out.table = std::move(table);
  return out;
}

}  // namespace fracfact
