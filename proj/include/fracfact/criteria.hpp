#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fracfact/bigint.hpp"
#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"
#include "fracfact/rational.hpp"

namespace fracfact {

// Moments (K_1, ..., K_tmax) of the pairwise coincidence distribution,
// every entry an exact rational over n(n-1)/2.
struct MomentPattern {
  std::vector<Rational> moments;
  int n = 0;
  int m = 0;
};

// Word counts (A_1, ..., A_kmax); integers for regular designs, rationals in
// general.
struct WordLengthPattern {
  std::vector<Rational> counts;
};

enum class PatternOrder { Better, Equal, Worse };

inline const char* to_string(PatternOrder o) {
  switch (o) {
    case PatternOrder::Better: return "better";
    case PatternOrder::Equal: return "equal";
    case PatternOrder::Worse: return "worse";
  }
  return "?";
}

/// Number of positions where two runs agree.
inline int coincidence(std::span<const int> run_a, std::span<const int> run_b) {
  if (run_a.size() != run_b.size())
    throw DimensionError("coincidence: runs have different lengths");
  int agree = 0;
  for (std::size_t k = 0; k < run_a.size(); ++k) agree += run_a[k] == run_b[k];
  return agree;
}

namespace detail {

// Rows packed as bitmasks (bit j set when level of factor j is -1), m <= 64.
inline std::vector<std::uint64_t> pack_rows(const DesignTable& d) {
  if (d.m() > 64) throw DimensionError("design too wide to pack (m > 64)");
  std::vector<std::uint64_t> packed(static_cast<std::size_t>(d.n()), 0);
  for (int i = 0; i < d.n(); ++i)
    for (int j = 0; j < d.m(); ++j)
      if (d.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] < 0)
        packed[static_cast<std::size_t>(i)] |= 1ULL << j;
  return packed;
}

// histogram[d] = number of run pairs with coincidence d.
inline std::vector<std::uint32_t> coincidence_histogram(
    std::span<const std::uint64_t> packed_rows, int m) {
  std::vector<std::uint32_t> hist(static_cast<std::size_t>(m) + 1, 0);
  for (std::size_t i = 0; i + 1 < packed_rows.size(); ++i)
    for (std::size_t j = i + 1; j < packed_rows.size(); ++j)
      ++hist[static_cast<std::size_t>(
          m - std::popcount(packed_rows[i] ^ packed_rows[j]))];
  return hist;
}

// Table of d^t for d = 0..max_base, t = 1..depth.
inline std::vector<std::vector<BigInt>> power_table(int max_base, int depth) {
  std::vector<std::vector<BigInt>> pw(static_cast<std::size_t>(max_base) + 1);
  for (int d = 0; d <= max_base; ++d) {
    auto& row = pw[static_cast<std::size_t>(d)];
    row.reserve(static_cast<std::size_t>(depth));
    BigInt p{1LL};
    for (int t = 1; t <= depth; ++t) {
      p.mul_small(static_cast<std::uint32_t>(d));
      row.push_back(p);
    }
  }
  return pw;
}

// Numerators sum_{i<j} delta^t for t = 1..depth; K_t = numerator / (n(n-1)/2).
inline std::vector<BigInt> moment_numerators(
    std::span<const std::uint32_t> hist,
    const std::vector<std::vector<BigInt>>& pw, int depth) {
  std::vector<BigInt> nums(static_cast<std::size_t>(depth));
  for (std::size_t d = 1; d < hist.size(); ++d) {
    std::uint32_t count = hist[d];
    if (count == 0) continue;
    for (int t = 1; t <= depth; ++t)
      nums[static_cast<std::size_t>(t - 1)].addmul(
          pw[d][static_cast<std::size_t>(t - 1)], count);
  }
  return nums;
}

// Columns packed as run bitmasks (bit i set when run i has level -1).
inline std::vector<std::vector<std::uint64_t>> pack_columns(
    const DesignTable& d) {
  std::size_t blocks = (static_cast<std::size_t>(d.n()) + 63) / 64;
  std::vector<std::vector<std::uint64_t>> cols(
      static_cast<std::size_t>(d.m()),
      std::vector<std::uint64_t>(blocks, 0));
  for (int i = 0; i < d.n(); ++i)
    for (int j = 0; j < d.m(); ++j)
      if (d.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] < 0)
        cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i) / 64] |=
            1ULL << (i % 64);
  return cols;
}

// Over all size-k column subsets: sum of (column-product sum)^2.
// The product column of a subset is the XOR of the packed columns, so each
// J value is n - 2*popcount.
inline std::uint64_t squared_j_sum(
    const std::vector<std::vector<std::uint64_t>>& cols, int n, int k) {
  int m = static_cast<int>(cols.size());
  std::size_t blocks = cols.empty() ? 0 : cols[0].size();
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  // Partial XORs: acc[d] = columns idx[0..d-1] combined.
  std::vector<std::vector<std::uint64_t>> acc(
      static_cast<std::size_t>(k) + 1, std::vector<std::uint64_t>(blocks, 0));
  auto refresh = [&](int from) {
    for (int d = from; d < k; ++d)
      for (std::size_t b = 0; b < blocks; ++b)
        acc[static_cast<std::size_t>(d) + 1][b] =
            acc[static_cast<std::size_t>(d)][b] ^
            cols[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])][b];
  };
  refresh(0);
  std::uint64_t total = 0;
  for (;;) {
    int ones = 0;
    for (std::size_t b = 0; b < blocks; ++b)
      ones += std::popcount(acc[static_cast<std::size_t>(k)][b]);
    std::int64_t j_sum = n - 2 * static_cast<std::int64_t>(ones);
    total += static_cast<std::uint64_t>(j_sum * j_sum);
    // Advance to the next combination in lexicographic order.
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int d = pos + 1; d < k; ++d)
      idx[static_cast<std::size_t>(d)] = idx[static_cast<std::size_t>(d - 1)] + 1;
    refresh(pos);
  }
  return total;
}

}  // namespace detail

/// Moment aberration pattern (K_1, ..., K_tmax), exact.
inline MomentPattern moment_pattern(const DesignTable& design, int tmax) {
  int n = design.n();
  int m = design.m();
  if (n < 2) throw InsufficientRunsError("moment_pattern: needs n >= 2");
  if (tmax < 1 || tmax > m)
    throw DimensionError("moment_pattern: tmax out of 1..m");
  auto packed = detail::pack_rows(design);
  auto hist = detail::coincidence_histogram(packed, m);
  auto pw = detail::power_table(m, tmax);
  auto nums = detail::moment_numerators(hist, pw, tmax);
  BigInt pair_count{static_cast<long long>(n) * (n - 1) / 2};
  MomentPattern out;
  out.n = n;
  out.m = m;
  out.moments.reserve(nums.size());
  for (auto& num : nums) out.moments.emplace_back(std::move(num), pair_count);
  return out;
}

/// Generalized word count A_k over all size-k column subsets.
/// For regular designs this is the number of defining words of length k.
inline Rational generalized_word_count(const DesignTable& design, int k) {
  if (k < 1 || k > design.m())
    throw DimensionError("generalized_word_count: k out of 1..m");
  auto cols = detail::pack_columns(design);
  std::uint64_t total = detail::squared_j_sum(cols, design.n(), k);
  return Rational(BigInt{total},
                  BigInt{static_cast<long long>(design.n()) * design.n()});
}

// Full generalized word length pattern. Subset enumeration is O(n 2^m), so
// this is offered only for m <= 16; wider designs get resolution (early exit)
// and moment patterns instead.
inline WordLengthPattern generalized_wlp(const DesignTable& design) {
  if (design.m() > 16)
    throw SpecError("generalized_wlp: only available for m <= 16");
  WordLengthPattern wlp;
  wlp.counts.reserve(static_cast<std::size_t>(design.m()));
  for (int k = 1; k <= design.m(); ++k)
    wlp.counts.push_back(generalized_word_count(design, k));
  return wlp;
}

/// Smallest k with A_k > 0; nullopt when every A_k vanishes (rendered as
/// ">= m+1" in reports).
inline std::optional<int> resolution(const DesignTable& design) {
  auto cols = detail::pack_columns(design);
  for (int k = 1; k <= design.m(); ++k)
    if (detail::squared_j_sum(cols, design.n(), k) != 0) return k;
  return std::nullopt;
}

/// Lexicographic left-to-right comparison; Better means `a` precedes `b`.
inline PatternOrder compare_patterns(std::span<const Rational> a,
                                     std::span<const Rational> b) {
  if (a.size() != b.size())
    throw DimensionError("compare_patterns: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto c = a[i] <=> b[i];
    if (c < 0) return PatternOrder::Better;
    if (c > 0) return PatternOrder::Worse;
  }
  return PatternOrder::Equal;
}

inline PatternOrder compare_patterns(const MomentPattern& a,
                                     const MomentPattern& b) {
  return compare_patterns(std::span<const Rational>(a.moments),
                          std::span<const Rational>(b.moments));
}

}  // namespace fracfact
