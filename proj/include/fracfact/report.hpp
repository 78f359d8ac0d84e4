#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fracfact/benchmark.hpp"
#include "fracfact/criteria.hpp"
#include "fracfact/errors.hpp"
#include "fracfact/rational.hpp"
#include "fracfact/reference.hpp"

namespace fracfact {

// Moments shown per run size: full pattern for 8 runs, the first four for
// 16 runs, the first six for 32 runs.
inline int display_prefix_length(int n, int m) {
  if (n <= 8) return m;
  if (n <= 16) return std::min(4, m);
  return std::min(6, m);
}

struct PatternFrequency {
  std::vector<Rational> prefix;  // exact values
  int count = 0;
  Optimality flag = Optimality::Unknown;
};

// One task's aggregated statistics, mirroring the benchmark report layout:
// resolution spread over compliant designs plus pattern frequencies among
// the top-resolution ones.
struct ReportRow {
  int task_id = 0;
  int n = 0;
  int m = 0;
  int total_records = 0;
  int compliant_count = 0;
  std::optional<Rational> res_min, res_median, res_max;
  std::vector<PatternFrequency> pattern_frequencies;
};

/// Aggregates one provider's records into per-task rows. Resolution
/// statistics cover compliant records only; the median of an even count is
/// the midpoint of the two central order statistics. Pattern frequencies
/// tabulate only records attaining the task's maximum observed resolution.
inline std::vector<ReportRow> aggregate(std::span<const RunRecord> records,
                                        const ReferenceStore& store) {
  std::string provider;
  for (const auto& r : records) {
    if (provider.empty()) provider = r.provider_id;
    if (r.provider_id != provider)
      throw AggregationError("records mix providers \"" + provider +
                             "\" and \"" + r.provider_id + "\"");
  }

  std::map<int, std::vector<const RunRecord*>> by_task;
  for (const auto& r : records) by_task[r.task_id].push_back(&r);

  std::vector<ReportRow> rows;
  for (const auto& [task_id, task_records] : by_task) {
    ReportRow row;
    row.task_id = task_id;
    row.n = task_records.front()->n;
    row.m = task_records.front()->m;
    row.total_records = static_cast<int>(task_records.size());

    // A missing resolution inside a compliant record means every word count
    // vanished; order it above any integer (rendered ">= m+1").
    auto res_value = [&](const RunRecord* r) {
      return r->resolution ? *r->resolution : row.m + 1;
    };
    std::vector<const RunRecord*> compliant;
    for (const RunRecord* r : task_records)
      if (r->compliance && r->compliance->cls == ComplianceClass::Compliant)
        compliant.push_back(r);
    row.compliant_count = static_cast<int>(compliant.size());

    if (!compliant.empty()) {
      std::vector<int> values;
      values.reserve(compliant.size());
      for (const RunRecord* r : compliant) values.push_back(res_value(r));
      std::sort(values.begin(), values.end());
      row.res_min = Rational(values.front());
      row.res_max = Rational(values.back());
      std::size_t half = values.size() / 2;
      row.res_median =
          values.size() % 2
              ? Rational(values[half])
              : (Rational(values[half - 1]) + Rational(values[half])) /
                    Rational(2);

      int top = values.back();
      int prefix_len = display_prefix_length(row.n, row.m);
      std::map<std::vector<std::string>, PatternFrequency> groups;
      for (const RunRecord* r : compliant) {
        if (res_value(r) != top || r->pattern.empty()) continue;
        std::vector<Rational> prefix(
            r->pattern.begin(),
            r->pattern.begin() +
                std::min<std::size_t>(r->pattern.size(),
                                      static_cast<std::size_t>(prefix_len)));
        std::vector<std::string> key;
        key.reserve(prefix.size());
        for (const auto& v : prefix)
          key.push_back(v.num().to_string() + "/" + v.den().to_string());
        auto [it, inserted] = groups.try_emplace(std::move(key));
        if (inserted) {
          it->second.prefix = prefix;
          it->second.flag = store.classify_pattern(
              row.n, row.m, std::span<const Rational>(r->pattern));
        }
        ++it->second.count;
      }
      for (auto& [key, freq] : groups) row.pattern_frequencies.push_back(freq);
      std::sort(row.pattern_frequencies.begin(), row.pattern_frequencies.end(),
                [](const PatternFrequency& a, const PatternFrequency& b) {
                  return compare_patterns(
                             std::span<const Rational>(a.prefix),
                             std::span<const Rational>(b.prefix)) ==
                         PatternOrder::Better;
                });
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

enum class ReportFormat { Markdown, Csv };

namespace detail {

inline std::string render_resolution(const std::optional<Rational>& r, int m) {
  if (!r) return "-";
  if (*r > Rational(m)) return ">=" + std::to_string(m + 1);
  return r->to_string();
}

inline std::string render_pattern(std::span<const Rational> prefix,
                                  Optimality flag) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) out << ", ";
    out << prefix[i].to_decimal(1);
  }
  out << ')';
  if (flag == Optimality::Optimal) out << '*';
  return out.str();
}

}  // namespace detail

/// Deterministic rendering; moments rounded half-up to one decimal, a star
/// marking patterns that match a confirmed minimum-aberration reference.
inline std::string emit_report(std::span<const ReportRow> rows,
                               ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Markdown) {
    out << "| Task | Runs | Factors | Min | Median | Max | Compliant |\n";
    out << "|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& row : rows) {
      out << "| " << row.task_id << " | " << row.n << " | " << row.m << " | "
          << detail::render_resolution(row.res_min, row.m) << " | "
          << detail::render_resolution(row.res_median, row.m) << " | "
          << detail::render_resolution(row.res_max, row.m) << " | "
          << row.compliant_count << " |\n";
    }
    out << "\n";
    out << "| Task | Runs | Factors | Resolution | Moment aberration pattern "
           "| Frequency |\n";
    out << "|---:|---:|---:|---:|:---|---:|\n";
    for (const auto& row : rows)
      for (const auto& freq : row.pattern_frequencies)
        out << "| " << row.task_id << " | " << row.n << " | " << row.m
            << " | " << detail::render_resolution(row.res_max, row.m) << " | "
            << detail::render_pattern(
                   std::span<const Rational>(freq.prefix), freq.flag)
            << " | " << freq.count << " |\n";
  } else {
    out << "task,runs,factors,res_min,res_median,res_max,compliant\n";
    for (const auto& row : rows) {
      out << row.task_id << ',' << row.n << ',' << row.m << ','
          << detail::render_resolution(row.res_min, row.m) << ','
          << detail::render_resolution(row.res_median, row.m) << ','
          << detail::render_resolution(row.res_max, row.m) << ','
          << row.compliant_count << "\n";
    }
    out << "\n";
    out << "task,runs,factors,resolution,pattern,frequency\n";
    for (const auto& row : rows)
      for (const auto& freq : row.pattern_frequencies) {
        out << row.task_id << ',' << row.n << ',' << row.m << ','
            << detail::render_resolution(row.res_max, row.m) << ",\""
            << detail::render_pattern(
                   std::span<const Rational>(freq.prefix), freq.flag)
            << "\"," << freq.count << "\n";
      }
  }
  return out.str();
}

}  // namespace fracfact
