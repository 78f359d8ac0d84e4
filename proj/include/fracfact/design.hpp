#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "fracfact/errors.hpp"

namespace fracfact {

/// Default factor labels: A..Z, then AA, AB, ...
inline std::vector<std::string> default_factor_labels(int m) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    if (i < 26) {
      labels.emplace_back(1, static_cast<char>('A' + i));
    } else {
      std::string s(1, static_cast<char>('A' + (i / 26 - 1)));
      s.push_back(static_cast<char>('A' + i % 26));
      labels.push_back(std::move(s));
    }
  }
  return labels;
}

// An n x m array over {-1, +1} with factor labels and run identifiers.
// Every evaluation criterion consumes this type.
struct DesignTable {
  std::vector<std::vector<int>> rows;
  std::vector<std::string> factor_labels;
  std::vector<int> run_ids;

  int n() const { return static_cast<int>(rows.size()); }
  int m() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }

  static DesignTable make(std::vector<std::vector<int>> rows,
                          std::vector<std::string> labels = {},
                          std::vector<int> run_ids = {}) {
    if (rows.empty()) throw DimensionError("design: no runs");
    std::size_t m = rows[0].size();
    if (m == 0) throw DimensionError("design: no factors");
    for (const auto& run : rows) {
      if (run.size() != m) throw DimensionError("design: ragged rows");
      for (int level : run)
        if (level != -1 && level != 1)
          throw DataError("design: level outside {-1, +1}");
    }
    DesignTable d;
    d.rows = std::move(rows);
    d.factor_labels =
        labels.empty() ? default_factor_labels(static_cast<int>(m))
                       : std::move(labels);
    if (d.factor_labels.size() != m)
      throw DimensionError("design: label count does not match factor count");
    std::unordered_set<std::string> seen;
    for (const auto& label : d.factor_labels)
      if (!seen.insert(label).second)
        throw DataError("design: duplicate factor label \"" + label + "\"");
    if (run_ids.empty()) {
      d.run_ids.resize(d.rows.size());
      for (std::size_t i = 0; i < d.rows.size(); ++i)
        d.run_ids[i] = static_cast<int>(i) + 1;
    } else {
      if (run_ids.size() != d.rows.size())
        throw DimensionError("design: run id count does not match run count");
      d.run_ids = std::move(run_ids);
    }
    return d;
  }
};

/// Row-order-insensitive equality: equal multisets of runs.
inline bool same_run_multiset(const DesignTable& a, const DesignTable& b) {
  if (a.n() != b.n() || a.m() != b.m()) return false;
  std::map<std::vector<int>, int> counts;
  for (const auto& run : a.rows) ++counts[run];
  for (const auto& run : b.rows)
    if (--counts[run] < 0) return false;
  return true;
}

}  // namespace fracfact
