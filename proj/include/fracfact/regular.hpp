#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracfact/criteria.hpp"
#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"

namespace fracfact {

// A product of factors as a membership bitmask over an ordered alphabet
// (basic factors for generators, all m factors for defining-relation words).
struct FactorWord {
  std::uint32_t mask = 0;

  int length() const { return std::popcount(mask); }
  bool contains(int factor) const { return (mask >> factor) & 1u; }

  friend bool operator==(FactorWord a, FactorWord b) { return a.mask == b.mask; }
  friend auto operator<=>(FactorWord a, FactorWord b) = default;
};

inline std::string word_to_string(FactorWord w,
                                  std::span<const std::string> alphabet) {
  std::string s;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (w.contains(static_cast<int>(i))) s += alphabet[i];
  return s.empty() ? "I" : s;
}

// One generated factor: target = product of the named basic factors.
struct GeneratorSpec {
  std::string target;
  FactorWord word;  // over the basic factors
};

// Closure of the generator words under GF(2) addition, identity excluded.
struct DefiningRelation {
  std::vector<FactorWord> words;  // sorted by (length, mask)
};

/// Reads notation like "ABC" into a membership mask over `alphabet`.
/// Longest-match so multi-character labels work; repeats are rejected.
inline FactorWord parse_word(std::string_view text,
                             std::span<const std::string> alphabet) {
  FactorWord word;
  std::size_t pos = 0;
  while (pos < text.size()) {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
      const std::string& label = alphabet[i];
      if (label.size() > best_len && text.substr(pos, label.size()) == label) {
        best = static_cast<int>(i);
        best_len = label.size();
      }
    }
    if (best < 0)
      throw WordParseError("unknown factor label at \"" +
                           std::string(text.substr(pos)) + "\"");
    if (word.contains(best))
      throw WordParseError("factor \"" + alphabet[static_cast<std::size_t>(
                               best)] + "\" repeated in word");
    word.mask |= 1u << best;
    pos += best_len;
  }
  return word;
}

/// Parses CLI notation "E=ABC,F=ABD,G=ACD" against the basic-factor labels.
inline std::vector<GeneratorSpec> parse_generators(
    std::string_view text, std::span<const std::string> basic_labels) {
  std::vector<GeneratorSpec> gens;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    // Trim surrounding whitespace.
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      std::size_t eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size())
        throw WordParseError("generator must look like \"E=ABC\": \"" +
                             std::string(item) + "\"");
      GeneratorSpec g;
      g.target = std::string(item.substr(0, eq));
      g.word = parse_word(item.substr(eq + 1), basic_labels);
      gens.push_back(std::move(g));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return gens;
}

namespace detail {

inline void check_generators(int b, std::span<const GeneratorSpec> generators,
                             std::span<const std::string> basic_labels) {
  for (const auto& g : generators) {
    if (g.word.mask >= (1u << b) || g.word.mask == 0)
      throw SpecError("generator \"" + g.target +
                      "\" references a non-basic factor");
    if (g.word.length() < 2)
      throw SpecError("generator \"" + g.target +
                      "\" must multiply at least two basic factors");
    for (const auto& label : basic_labels)
      if (label == g.target)
        throw SpecError("generator target \"" + g.target +
                        "\" collides with a basic factor");
  }
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j)
      if (generators[i].target == generators[j].target)
        throw SpecError("duplicate generator target \"" +
                        generators[i].target + "\"");
}

}  // namespace detail

/// Builds the 2^b-run regular design: basic columns enumerate every level
/// combination (canonical order: last basic factor fastest, starting all -1);
/// each generated column is the row-wise product of its word's columns.
/// Row order is canonical, so design comparisons should use run multisets.
inline DesignTable build_design(int b,
                                std::span<const GeneratorSpec> generators,
                                std::vector<std::string> basic_labels = {}) {
  if (b < 1 || b > 20) throw SpecError("build_design: b out of range");
  if (basic_labels.empty()) basic_labels = default_factor_labels(b);
  if (static_cast<int>(basic_labels.size()) != b)
    throw SpecError("build_design: need exactly b basic labels");
  detail::check_generators(b, generators, basic_labels);

  int n = 1 << b;
  int m = b + static_cast<int>(generators.size());
  std::vector<std::vector<int>> rows(
      static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(m)));
  for (int r = 0; r < n; ++r) {
    auto& run = rows[static_cast<std::size_t>(r)];
    for (int j = 0; j < b; ++j)
      run[static_cast<std::size_t>(j)] = ((r >> (b - 1 - j)) & 1) ? 1 : -1;
    for (std::size_t g = 0; g < generators.size(); ++g) {
      int prod = 1;
      for (int j = 0; j < b; ++j)
        if (generators[g].word.contains(j)) prod *= run[static_cast<std::size_t>(j)];
      run[static_cast<std::size_t>(b) + g] = prod;
    }
  }
  std::vector<std::string> labels = std::move(basic_labels);
  for (const auto& g : generators) labels.push_back(g.target);
  return DesignTable::make(std::move(rows), std::move(labels));
}

/// Closure of the p generator words (each extended by its target factor)
/// under symmetric difference; exactly 2^p - 1 words.
inline DefiningRelation defining_relation(
    std::span<const GeneratorSpec> generators, int m) {
  int b = m - static_cast<int>(generators.size());
  if (b < 0) throw SpecError("defining_relation: more generators than factors");
  std::vector<std::uint32_t> base;
  base.reserve(generators.size());
  for (std::size_t g = 0; g < generators.size(); ++g) {
    if (generators[g].word.mask >= (1u << b))
      throw SpecError("defining_relation: generator word exceeds basic factors");
    base.push_back(generators[g].word.mask |
                   (1u << (b + static_cast<int>(g))));
  }
  DefiningRelation rel;
  std::uint32_t subsets = 1u << generators.size();
  rel.words.reserve(subsets - 1);
  for (std::uint32_t s = 1; s < subsets; ++s) {
    std::uint32_t acc = 0;
    for (std::size_t g = 0; g < generators.size(); ++g)
      if ((s >> g) & 1u) acc ^= base[g];
    rel.words.push_back(FactorWord{acc});
  }
  std::sort(rel.words.begin(), rel.words.end(),
            [](FactorWord a, FactorWord b2) {
              if (a.length() != b2.length()) return a.length() < b2.length();
              return a.mask < b2.mask;
            });
  return rel;
}

/// Integer word counts by length; sum is 2^p - 1.
inline WordLengthPattern wlp_from_relation(const DefiningRelation& relation,
                                           int m) {
  std::vector<long long> counts(static_cast<std::size_t>(m), 0);
  for (const auto& w : relation.words) {
    int len = w.length();
    if (len < 1 || len > m)
      throw DimensionError("wlp_from_relation: word length out of 1..m");
    ++counts[static_cast<std::size_t>(len - 1)];
  }
  WordLengthPattern wlp;
  wlp.counts.reserve(counts.size());
  for (long long c : counts) wlp.counts.emplace_back(c);
  return wlp;
}

/// Smallest i with A_i > 0; nullopt for the all-zero WLP.
inline std::optional<int> resolution_from_wlp(const WordLengthPattern& wlp) {
  for (std::size_t i = 0; i < wlp.counts.size(); ++i)
    if (wlp.counts[i].sign() > 0) return static_cast<int>(i) + 1;
  return std::nullopt;
}

}  // namespace fracfact
