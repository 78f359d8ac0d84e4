#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "fracfact/criteria.hpp"
#include "fracfact/csv.hpp"
#include "fracfact/regular.hpp"
#include "support/test_support.hpp"

using namespace fracfact;

namespace {

const std::vector<std::string> kABCD{"A", "B", "C", "D"};

std::vector<GeneratorSpec> eq1_generators() {
  return {{"E", parse_word("ABC", kABCD)},
          {"F", parse_word("ABD", kABCD)},
          {"G", parse_word("ACD", kABCD)}};
}

}  // namespace

TEST_CASE("parse_word reads factor products") {
  auto abc = parse_word("ABC", kABCD);
  CHECK(abc.mask == 0b0111u);
  CHECK(abc.length() == 3);
  auto acd = parse_word("ACD", kABCD);
  CHECK(acd.mask == 0b1101u);
  CHECK_THROWS_AS(parse_word("AAB", kABCD), WordParseError);
  CHECK_THROWS_AS(parse_word("AXB", kABCD), WordParseError);

  // Longest match wins with multi-character labels.
  std::vector<std::string> labels{"A", "AB"};
  CHECK(parse_word("AB", labels).mask == 0b10u);
  CHECK(parse_word("AAB", labels).mask == 0b11u);
}

TEST_CASE("parse_generators reads CLI notation") {
  auto gens = parse_generators("E=ABC, F=ABD ,G=ACD", kABCD);
  REQUIRE(gens.size() == 3);
  CHECK(gens[0].target == "E");
  CHECK(gens[2].word.mask == 0b1101u);
  CHECK_THROWS_AS(parse_generators("EABC", kABCD), WordParseError);
}

TEST_CASE("build_design reproduces the 8-run half fraction") {
  std::vector<std::string> basics{"A", "B", "C"};
  std::vector<GeneratorSpec> gens{{"D", parse_word("ABC", basics)}};
  auto d = build_design(3, gens, basics);
  REQUIRE(d.n() == 8);
  REQUIRE(d.m() == 4);
  CHECK(d.factor_labels == std::vector<std::string>{"A", "B", "C", "D"});

  // The half fraction with D = ABC, as a run multiset (the published table
  // lists rows in a different order).
  auto expected = DesignTable::make({
      {-1, -1, -1, -1},
      {1, -1, -1, 1},
      {-1, 1, -1, 1},
      {1, 1, -1, -1},
      {-1, -1, 1, 1},
      {1, -1, 1, -1},
      {-1, 1, 1, -1},
      {1, 1, 1, 1},
  });
  CHECK(same_run_multiset(d, expected));

  // Canonical order: all-(-1) first, last basic factor fastest.
  CHECK(d.rows[0] == std::vector<int>{-1, -1, -1, -1});
  CHECK(d.rows[1] == std::vector<int>{-1, -1, 1, 1});

  // Every generated column is the row-wise product of its word's columns.
  for (const auto& run : d.rows) CHECK(run[3] == run[0] * run[1] * run[2]);
}

TEST_CASE("build_design reproduces the published 16-run 7-factor design") {
  auto d = build_design(4, eq1_generators(), kABCD);
  auto published =
      read_design_file(testsupport::fixture_path("table1.csv"));
  CHECK(same_run_multiset(d, published));
}

TEST_CASE("build_design with no generators is the full factorial") {
  auto d = build_design(2, {});
  REQUIRE(d.n() == 4);
  REQUIRE(d.m() == 2);
  std::set<std::vector<int>> runs(d.rows.begin(), d.rows.end());
  CHECK(runs.size() == 4);
}

TEST_CASE("build_design rejects bad generators") {
  std::vector<std::string> basics{"A", "B", "C"};
  CHECK_THROWS_AS(
      build_design(3, std::vector<GeneratorSpec>{{"D", FactorWord{0b1000}}},
                   basics),
      SpecError);
  CHECK_THROWS_AS(
      build_design(3, std::vector<GeneratorSpec>{{"D", FactorWord{0b001}}},
                   basics),
      SpecError);
  CHECK_THROWS_AS(
      build_design(3, std::vector<GeneratorSpec>{{"A", FactorWord{0b011}}},
                   basics),
      SpecError);
}

TEST_CASE("defining relation closure") {
  auto rel = defining_relation(eq1_generators(), 7);
  REQUIRE(rel.words.size() == 7);  // 2^3 - 1

  // The seven words: ABCE, ABDF, ACDG, CDEF, BDEG, BCFG, AEFG.
  auto all7 = default_factor_labels(7);
  std::set<std::string> words;
  for (auto w : rel.words) words.insert(word_to_string(w, all7));
  std::set<std::string> expected{"ABCE", "ABDF", "ACDG", "CDEF",
                                 "BDEG", "BCFG", "AEFG"};
  CHECK(words == expected);

  // Closed under symmetric difference (identity excluded).
  for (auto wa : rel.words)
    for (auto wb : rel.words) {
      if (wa == wb) continue;
      FactorWord sum{wa.mask ^ wb.mask};
      CHECK(std::count(rel.words.begin(), rel.words.end(), sum) == 1);
    }
}

TEST_CASE("defining relation of a single generator") {
  std::vector<std::string> basics{"A", "B", "C"};
  std::vector<GeneratorSpec> gens{{"D", parse_word("ABC", basics)}};
  auto rel = defining_relation(gens, 4);
  REQUIRE(rel.words.size() == 1);
  CHECK(rel.words[0].mask == 0b1111u);

  auto empty = defining_relation({}, 3);
  CHECK(empty.words.empty());
}

TEST_CASE("wlp from relation") {
  auto rel = defining_relation(eq1_generators(), 7);
  auto wlp = wlp_from_relation(rel, 7);
  REQUIRE(wlp.counts.size() == 7);
  std::vector<Rational> expected{0, 0, 0, 7, 0, 0, 0};
  CHECK(wlp.counts == expected);

  std::vector<std::string> basics{"A", "B", "C"};
  std::vector<GeneratorSpec> gens{{"D", parse_word("ABC", basics)}};
  auto wlp2 = wlp_from_relation(defining_relation(gens, 4), 4);
  CHECK(wlp2.counts == std::vector<Rational>{0, 0, 0, 1});

  auto wlp3 = wlp_from_relation(DefiningRelation{}, 3);
  CHECK(wlp3.counts == std::vector<Rational>{0, 0, 0});
}

TEST_CASE("resolution from wlp") {
  auto rel = defining_relation(eq1_generators(), 7);
  CHECK(resolution_from_wlp(wlp_from_relation(rel, 7)) == 4);
  WordLengthPattern one_word{{0, 0, 0, 1}};
  CHECK(resolution_from_wlp(one_word) == 4);
  WordLengthPattern zeros{{0, 0, 0}};
  CHECK(resolution_from_wlp(zeros) == std::nullopt);
}

TEST_CASE("basic columns always project onto the full factorial") {
  fracfact::SplitMix64 rng(99);
  for (int iter = 0; iter < 30; ++iter) {
    int b = 2 + static_cast<int>(rng.next() % 3);  // 2..4
    int p = static_cast<int>(rng.next() % 4);
    auto basics = default_factor_labels(b);
    std::vector<GeneratorSpec> gens;
    for (int g = 0; g < p; ++g) {
      std::uint32_t mask = 0;
      while (std::popcount(mask) < 2)
        mask = static_cast<std::uint32_t>(rng.next()) & ((1u << b) - 1);
      gens.push_back({std::string(1, static_cast<char>('Q' + g)),
                      FactorWord{mask}});
    }
    auto d = build_design(b, gens, basics);
    std::set<std::vector<int>> basic_runs;
    for (const auto& run : d.rows)
      basic_runs.insert(std::vector<int>(run.begin(), run.begin() + b));
    CHECK(static_cast<int>(basic_runs.size()) == 1 << b);
  }
}

TEST_CASE("generalized word counts equal defining-relation counts") {
  // Dual-route oracle: subset J-sums and defining-relation counts must
  // agree exactly on every regular design.
  fracfact::SplitMix64 rng(555);
  for (int iter = 0; iter < 60; ++iter) {
    int b = 3 + static_cast<int>(rng.next() % 2);  // 8 or 16 runs
    int max_p = std::min(6, (1 << b) - 1 - b);
    int p = 1 + static_cast<int>(rng.next() % max_p);
    int m = b + p;
    if (m > 10) continue;
    auto basics = default_factor_labels(b);
    std::vector<GeneratorSpec> gens;
    for (int g = 0; g < p; ++g) {
      std::uint32_t mask = 0;
      while (std::popcount(mask) < 2)
        mask = static_cast<std::uint32_t>(rng.next()) & ((1u << b) - 1);
      gens.push_back({std::string(1, static_cast<char>('Q' + g)),
                      FactorWord{mask}});
    }
    auto design = build_design(b, gens, basics);
    auto wlp = wlp_from_relation(defining_relation(gens, m), m);
    for (int k = 1; k <= m; ++k)
      CHECK(generalized_word_count(design, k) ==
            wlp.counts[static_cast<std::size_t>(k - 1)]);
    CHECK(resolution(design) == resolution_from_wlp(wlp));
  }
}
