#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fracfact/criteria.hpp"
#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"
#include "fracfact/rational.hpp"

namespace fracfact {

enum class PatternStatus { Confirmed, BestFound };
enum class PatternPrecision { Display, Exact };

inline const char* to_string(PatternStatus s) {
  return s == PatternStatus::Confirmed ? "confirmed" : "best-found";
}
inline const char* to_string(PatternPrecision p) {
  return p == PatternPrecision::Display ? "display" : "exact";
}

// One best-known moment pattern for a run/factor size. Display-precision
// records hold values as published (rounded to one decimal); exact records
// hold full rationals from our own searches.
struct ReferenceRecord {
  int n = 0;
  int m = 0;
  PatternStatus status = PatternStatus::BestFound;
  PatternPrecision precision = PatternPrecision::Display;
  std::string provenance;
  std::vector<Rational> pattern;
};

enum class Optimality { Optimal, Suboptimal, Unknown };

inline const char* to_string(Optimality o) {
  switch (o) {
    case Optimality::Optimal: return "optimal";
    case Optimality::Suboptimal: return "suboptimal";
    case Optimality::Unknown: return "unknown";
  }
  return "?";
}

// Published best-known patterns: full patterns for 8 runs, 4-moment prefixes
// for 16 runs, 6-moment prefixes for 32 runs. The 16-run 12-factor record is
// best-found: its source lists the pattern without a minimum-aberration
// mark, so matching it never earns a star.
inline constexpr std::string_view kBuiltinReferenceText =
    R"(fracfact-reference-store v1
# n m status precision provenance pattern
8 4 confirmed display published 1.7,3.4,6.9,13.7
8 5 confirmed display published 2.1,5.0,12.4,32.4,87.9
8 6 confirmed display published 2.6,6.9,18.9,53.1,152.6,444.0
8 7 confirmed display published 3.0,9.0,27.0,81.0,243.0,729.0,2187.0
16 5 confirmed display published 2.3,6.3,18.3,54.3
16 6 confirmed display published 2.8,8.8,28.8,97.6
16 7 confirmed display published 3.3,11.7,42.5,157.3
16 8 confirmed display published 3.7,14.9,59.7,238.9
16 9 confirmed display published 4.2,18.6,84.2,386.6
16 10 confirmed display published 4.7,22.7,113.1,575.5
16 11 confirmed display published 5.1,27.1,146.7,807.9
16 12 best-found display published 5.6,32,186.4,1105.6
16 13 confirmed display published 6.1,37.3,231.7,1456.5
16 14 confirmed display published 6.5,42.9,283.7,1885.3
16 15 confirmed display published 7.0,49,343,2401.0
32 6 confirmed display published 2.9,9.7,34.8,131.6,511.0,2012.9
32 7 confirmed display published 3.4,12.9,52.2,220.4,959.5,4278.7
32 8 confirmed display published 3.9,16.5,74.3,346.3,1656.8,8099.1
32 9 confirmed display published 4.4,20.6,101.9,517.6,2683.1,14141.9
32 12 confirmed display published 5.8,35.6,223.0,1423.0,9243.9,61042.1
)";

class ReferenceStore {
 public:
  static ReferenceStore builtin() { return parse(kBuiltinReferenceText); }

  static ReferenceStore parse(std::string_view text) {
    ReferenceStore store;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("fracfact-reference-store", 0) != 0)
      throw DataError("reference store: missing version header");
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream row(line);
      ReferenceRecord rec;
      std::string status, precision, pattern;
      if (!(row >> rec.n >> rec.m >> status >> precision >> rec.provenance >>
            pattern))
        throw DataError("reference store: malformed line " +
                        std::to_string(line_no));
      if (status == "confirmed")
        rec.status = PatternStatus::Confirmed;
      else if (status == "best-found")
        rec.status = PatternStatus::BestFound;
      else
        throw DataError("reference store: bad status on line " +
                        std::to_string(line_no));
      if (precision == "display")
        rec.precision = PatternPrecision::Display;
      else if (precision == "exact")
        rec.precision = PatternPrecision::Exact;
      else
        throw DataError("reference store: bad precision on line " +
                        std::to_string(line_no));
      std::size_t start = 0;
      while (start <= pattern.size()) {
        std::size_t comma = pattern.find(',', start);
        if (comma == std::string::npos) comma = pattern.size();
        rec.pattern.push_back(
            Rational::parse(std::string_view(pattern).substr(start, comma - start)));
        if (comma == pattern.size()) break;
        start = comma + 1;
      }
      store.records_[{rec.n, rec.m}] = std::move(rec);
    }
    return store;
  }

  static ReferenceStore load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open reference store: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "fracfact-reference-store v1\n";
    out << "# n m status precision provenance pattern\n";
    for (const auto& [key, rec] : records_) {
      out << rec.n << ' ' << rec.m << ' ' << to_string(rec.status) << ' '
          << to_string(rec.precision) << ' ' << rec.provenance << ' ';
      for (std::size_t i = 0; i < rec.pattern.size(); ++i) {
        if (i) out << ',';
        out << (rec.precision == PatternPrecision::Display
                    ? rec.pattern[i].to_string()
                    : rec.pattern[i].num().to_string() + "/" +
                          rec.pattern[i].den().to_string());
      }
      out << '\n';
    }
    return out.str();
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write reference store: " + path);
    out << serialize();
  }

  const ReferenceRecord* find(int n, int m) const {
    auto it = records_.find({n, m});
    return it == records_.end() ? nullptr : &it->second;
  }

  /// Installs a full-precision pattern from a search run. An existing record
  /// is replaced when the new pattern is better, or when it matches at the
  /// stored precision and the new record carries more information.
  void publish(int n, int m, std::span<const Rational> pattern,
               PatternStatus status, const std::string& provenance) {
    ReferenceRecord rec;
    rec.n = n;
    rec.m = m;
    rec.status = status;
    rec.precision = PatternPrecision::Exact;
    rec.provenance = provenance;
    rec.pattern.assign(pattern.begin(), pattern.end());
    auto it = records_.find({n, m});
    if (it != records_.end()) {
      Optimality vs = classify_against(it->second, pattern);
      bool better = vs == Optimality::Unknown &&
                    it->second.status == PatternStatus::BestFound;
      bool matches = vs == Optimality::Optimal ||
                     (vs == Optimality::Unknown &&
                      prefix_matches(it->second, pattern));
      if (!better && !matches) return;  // never downgrade to a worse pattern
    }
    records_[{n, m}] = std::move(rec);
  }

  std::size_t size() const { return records_.size(); }

  /// Compares a design's full exact pattern against the stored best-known
  /// one. Worse-than-reference proves suboptimality; a match earns Optimal
  /// only from a confirmed reference; anything else is Unknown.
  Optimality classify_pattern(int n, int m,
                              std::span<const Rational> full_pattern) const {
    const ReferenceRecord* ref = find(n, m);
    if (!ref) return Optimality::Unknown;
    return classify_against(*ref, full_pattern);
  }

 private:
  std::map<std::pair<int, int>, ReferenceRecord> records_;

  static bool prefix_matches(const ReferenceRecord& ref,
                             std::span<const Rational> pattern) {
    std::size_t len = std::min(ref.pattern.size(), pattern.size());
    for (std::size_t i = 0; i < len; ++i) {
      Rational lhs = ref.precision == PatternPrecision::Display
                         ? pattern[i].round_half_up(1)
                         : pattern[i];
      if (!(lhs == ref.pattern[i])) return false;
    }
    return true;
  }

  static Optimality classify_against(const ReferenceRecord& ref,
                                     std::span<const Rational> pattern) {
    std::size_t len = std::min(ref.pattern.size(), pattern.size());
    for (std::size_t i = 0; i < len; ++i) {
      Rational lhs = ref.precision == PatternPrecision::Display
                         ? pattern[i].round_half_up(1)
                         : pattern[i];
      auto c = lhs <=> ref.pattern[i];
      if (c > 0) return Optimality::Suboptimal;
      if (c < 0) return Optimality::Unknown;  // beats the stored best
    }
    return ref.status == PatternStatus::Confirmed ? Optimality::Optimal
                                                  : Optimality::Unknown;
  }
};

/// Convenience: classify a design by its own moment pattern.
inline Optimality is_optimal(const ReferenceStore& store,
                             const DesignTable& design) {
  auto pattern = moment_pattern(design, design.m());
  return store.classify_pattern(design.n(), design.m(),
                                std::span<const Rational>(pattern.moments));
}

}  // namespace fracfact
