#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fracfact/criteria.hpp"
#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"
#include "fracfact/rng.hpp"

namespace fracfact {

// The saturated n-run universe: every nonzero GF(2) combination of the b
// basic effects, each paired with its realized +-1 column.
struct ColumnUniverse {
  int b = 0;
  std::vector<std::uint32_t> masks;      // 1 .. 2^b - 1
  std::vector<std::uint64_t> run_bits;   // run_bits[c] bit r: level -1 at run r

  static ColumnUniverse saturated(int b) {
    if (b < 1 || b > 6)
      throw SpecError("column universe: b out of supported range 1..6");
    ColumnUniverse u;
    u.b = b;
    std::uint32_t count = (1u << b) - 1;
    u.masks.reserve(count);
    u.run_bits.reserve(count);
    for (std::uint32_t c = 1; c <= count; ++c) {
      u.masks.push_back(c);
      u.run_bits.push_back(realize(b, c));
    }
    return u;
  }

  // Bitmask over the 2^b runs: bit r set when column `mask` has level -1 at
  // run r, consistent with build_design's canonical run order (basic factor
  // j is -1 at run r when bit (b-1-j) of r is clear).
  static std::uint64_t realize(int b, std::uint32_t mask) {
    std::uint64_t bits = 0;
    int n = 1 << b;
    for (int r = 0; r < n; ++r) {
      int minus_count = 0;
      for (int j = 0; j < b; ++j)
        if ((mask >> j) & 1u)
          if (((r >> (b - 1 - j)) & 1) == 0) ++minus_count;
      if (minus_count & 1) bits |= 1ULL << r;
    }
    return bits;
  }
};

struct SearchConfig {
  std::uint64_t exhaustive_budget = 1'000'000;
  int restarts = 200;
  std::uint64_t seed = 0;
  int objective_depth = 0;  // 0 = compare all m moments
};

enum class SearchMode { Exhaustive, Heuristic };

inline const char* to_string(SearchMode m) {
  return m == SearchMode::Exhaustive ? "exhaustive" : "heuristic";
}

struct SearchResult {
  DesignTable design;
  MomentPattern pattern;                  // full m moments, exact
  std::optional<WordLengthPattern> wlp;   // absent when m > 16
  SearchMode mode = SearchMode::Exhaustive;
  std::uint64_t evaluations = 0;
  std::vector<std::uint32_t> column_masks;
};

namespace detail {

inline int gf2_rank(std::span<const std::uint32_t> masks) {
  std::uint32_t pivots[32] = {0};
  int rank = 0;
  for (std::uint32_t mask : masks) {
    std::uint32_t v = mask;
    while (v) {
      int hi = 31 - std::countl_zero(v);
      if (pivots[hi] == 0) {
        pivots[hi] = v;
        ++rank;
        break;
      }
      v ^= pivots[hi];
    }
  }
  return rank;
}

// Lexicographic moment objective for one column selection, evaluated lazily
// against the incumbent: returns the full numerator vector only when the
// candidate is strictly better, nullopt otherwise.
class MomentObjective {
 public:
  MomentObjective(const ColumnUniverse& universe, int m, int depth)
      : universe_(universe),
        n_(1 << universe.b),
        m_(m),
        depth_(depth),
        pw_(power_table(m, depth)) {}

  std::optional<std::vector<BigInt>> better_than(
      std::span<const std::uint32_t> selection,
      const std::vector<BigInt>* incumbent) {
    // Pack each run's levels across the selection.
    std::uint32_t rows[64];
    for (int r = 0; r < n_; ++r) rows[r] = 0;
    for (std::size_t j = 0; j < selection.size(); ++j) {
      std::uint64_t bits = universe_.run_bits[selection[j] - 1];
      for (int r = 0; r < n_; ++r)
        rows[r] |= static_cast<std::uint32_t>((bits >> r) & 1ULL) << j;
    }
    std::uint32_t hist[33] = {0};
    for (int i = 0; i + 1 < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        ++hist[m_ - std::popcount(rows[i] ^ rows[j])];

    std::vector<BigInt> nums;
    nums.reserve(static_cast<std::size_t>(depth_));
    bool decided_better = false;
    for (int t = 1; t <= depth_; ++t) {
      BigInt num;
      for (int d = 1; d <= m_; ++d)
        if (hist[d])
          num.addmul(pw_[static_cast<std::size_t>(d)]
                        [static_cast<std::size_t>(t - 1)],
                     hist[static_cast<std::size_t>(d)]);
      if (incumbent && !decided_better) {
        auto c = num <=> (*incumbent)[static_cast<std::size_t>(t - 1)];
        if (c > 0) return std::nullopt;  // worse: prune
        if (c < 0) decided_better = true;
      }
      nums.push_back(std::move(num));
    }
    if (incumbent && !decided_better) return std::nullopt;  // equal
    return nums;
  }

 private:
  const ColumnUniverse& universe_;
  int n_, m_, depth_;
  std::vector<std::vector<BigInt>> pw_;
};

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k,
                                     std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (c > cap && cap < (std::uint64_t(1) << 60)) return cap + 1;  // saturate
    // c * (n - k + i) / i stays integral at every step.
    c = c * (n - k + i) / i;
  }
  return c;
}

}  // namespace detail

/// Minimum moment aberration search over m-column selections of the
/// saturated 2^b design. Exhaustive (provably optimal) when the subset
/// count fits the budget, else seeded multistart local search over
/// single-column swaps with first-improvement acceptance.
inline SearchResult search_min_aberration(int n, int m,
                                          const SearchConfig& config = {}) {
  if (n != 8 && n != 16 && n != 32)
    throw SpecError("search: validated run sizes are 8, 16, 32");
  int b = std::countr_zero(static_cast<unsigned>(n));
  int universe_size = n - 1;
  if (m < b || m > universe_size)
    throw SpecError("search: factors must satisfy log2(n) <= m <= n-1");
  if (config.restarts < 1) throw SpecError("search: restarts must be >= 1");
  if (config.exhaustive_budget < 1)
    throw SpecError("search: exhaustive budget must be >= 1");

  auto universe = ColumnUniverse::saturated(b);
  int depth = config.objective_depth > 0 ? std::min(config.objective_depth, m)
                                         : m;
  detail::MomentObjective objective(universe, m, depth);

  std::uint64_t evaluations = 0;
  std::vector<std::uint32_t> best_selection;
  std::vector<BigInt> best_key;

  auto consider = [&](std::span<const std::uint32_t> selection) {
    ++evaluations;
    if (detail::gf2_rank(selection) != b) return;
    auto key = objective.better_than(
        selection, best_key.empty() ? nullptr : &best_key);
    if (key) {
      best_key = std::move(*key);
      best_selection.assign(selection.begin(), selection.end());
    }
  };

  int small_side = std::min(m, universe_size - m);
  bool exhaustive = detail::binomial_capped(
                        static_cast<std::uint64_t>(universe_size),
                        static_cast<std::uint64_t>(small_side),
                        config.exhaustive_budget) <= config.exhaustive_budget;

  if (exhaustive) {
    // Enumerate the smaller of selection vs complement.
    bool complement_side = small_side != m;
    std::vector<int> idx(static_cast<std::size_t>(small_side));
    for (int i = 0; i < small_side; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::vector<std::uint32_t> selection;
    for (;;) {
      selection.clear();
      if (complement_side) {
        std::size_t next = 0;
        for (int c = 0; c < universe_size; ++c) {
          if (next < idx.size() && idx[next] == c) {
            ++next;
            continue;
          }
          selection.push_back(universe.masks[static_cast<std::size_t>(c)]);
        }
      } else {
        for (int i : idx)
          selection.push_back(universe.masks[static_cast<std::size_t>(i)]);
      }
      consider(selection);
      if (small_side == 0) break;
      int pos = small_side - 1;
      while (pos >= 0 &&
             idx[static_cast<std::size_t>(pos)] == universe_size - small_side + pos)
        --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int d = pos + 1; d < small_side; ++d)
        idx[static_cast<std::size_t>(d)] =
            idx[static_cast<std::size_t>(d - 1)] + 1;
    }
    if (best_selection.empty())
      throw SpecError("search: no full-rank selection exists");
  } else {
    for (int restart = 0; restart < config.restarts; ++restart) {
      SplitMix64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(restart)));
      // Random full-rank start.
      std::vector<std::uint32_t> order = universe.masks;
      std::vector<std::uint32_t> selection;
      int attempts = 0;
      for (;;) {
        fisher_yates(order, rng);
        selection.assign(order.begin(), order.begin() + m);
        if (detail::gf2_rank(selection) == b) break;
        if (++attempts > 1000)
          throw SpecError("search: no full-rank selection found");
      }
      std::sort(selection.begin(), selection.end());

      std::vector<BigInt> current_key;
      {
        ++evaluations;
        auto key = objective.better_than(selection, nullptr);
        current_key = std::move(*key);
      }

      // First-improvement over single column swaps, deterministic scan order.
      bool improved = true;
      std::vector<std::uint32_t> neighbor;
      while (improved) {
        improved = false;
        std::vector<std::uint32_t> complement;
        for (std::uint32_t mask : universe.masks)
          if (!std::binary_search(selection.begin(), selection.end(), mask))
            complement.push_back(mask);
        for (std::size_t si = 0; si < selection.size() && !improved; ++si) {
          for (std::size_t ci = 0; ci < complement.size() && !improved; ++ci) {
            neighbor = selection;
            neighbor[si] = complement[ci];
            ++evaluations;
            if (detail::gf2_rank(neighbor) != b) continue;
            auto key = objective.better_than(neighbor, &current_key);
            if (key) {
              current_key = std::move(*key);
              std::sort(neighbor.begin(), neighbor.end());
              selection = neighbor;
              improved = true;
            }
          }
        }
      }

      if (best_key.empty() ||
          std::lexicographical_compare(current_key.begin(), current_key.end(),
                                       best_key.begin(), best_key.end())) {
        best_key = std::move(current_key);
        best_selection = selection;
      }
    }
  }

  // Realize the winning selection as a design table.
  std::vector<std::vector<int>> rows(
      static_cast<std::size_t>(n),
      std::vector<int>(static_cast<std::size_t>(m)));
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < m; ++j)
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
          (universe.run_bits[best_selection[static_cast<std::size_t>(j)] - 1] >>
           r) & 1ULL
              ? -1
              : 1;
  SearchResult result;
  result.design = DesignTable::make(std::move(rows));
  result.pattern = moment_pattern(result.design, m);
  if (m <= 16) result.wlp = generalized_wlp(result.design);
  result.mode = exhaustive ? SearchMode::Exhaustive : SearchMode::Heuristic;
  result.evaluations = evaluations;
  result.column_masks = best_selection;
  return result;
}

}  // namespace fracfact
