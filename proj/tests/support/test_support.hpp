#pragma once

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "fracfact/benchmark.hpp"
#include "fracfact/bigint.hpp"
#include "fracfact/csv.hpp"
#include "fracfact/design.hpp"
#include "fracfact/rational.hpp"
#include "fracfact/regular.hpp"
#include "fracfact/rng.hpp"

#ifndef FRACFACT_FIXTURES_DIR
#define FRACFACT_FIXTURES_DIR "tests/fixtures"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(FRACFACT_FIXTURES_DIR) + "/" + name;
}

// Fresh directory under the build tree's temp space.
inline std::string make_temp_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("fracfact_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline fracfact::DesignTable random_design(fracfact::SplitMix64& rng, int n,
                                           int m) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(n),
                                     std::vector<int>(static_cast<std::size_t>(m)));
  for (auto& run : rows)
    for (auto& cell : run) cell = rng.next() & 1 ? 1 : -1;
  return fracfact::DesignTable::make(std::move(rows));
}

// Straightforward double-loop moment oracle: per pair, count agreements with
// plain integer comparisons, then accumulate delta^t with big-integer powers.
inline std::vector<fracfact::Rational> moment_oracle(
    const fracfact::DesignTable& d, int tmax) {
  using fracfact::BigInt;
  int n = d.n();
  std::vector<BigInt> numerators(static_cast<std::size_t>(tmax));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int delta = 0;
      for (int k = 0; k < d.m(); ++k)
        if (d.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] ==
            d.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)])
          ++delta;
      for (int t = 1; t <= tmax; ++t)
        numerators[static_cast<std::size_t>(t - 1)] +=
            BigInt::pow(static_cast<std::uint64_t>(delta),
                        static_cast<unsigned>(t));
    }
  std::vector<fracfact::Rational> out;
  BigInt pairs{static_cast<long long>(n) * (n - 1) / 2};
  for (auto& num : numerators) out.emplace_back(num, pairs);
  return out;
}

// Regular design for a benchmark cell: b basic factors plus generators drawn
// from the longest interaction words first, so single-generator cells (8,4),
// (16,5), (32,6) come out as the textbook optimal designs.
inline fracfact::DesignTable fixture_design(int n, int m) {
  int b = 0;
  while ((1 << b) < n) ++b;
  auto basics = fracfact::default_factor_labels(b);
  std::vector<std::uint32_t> words;
  for (std::uint32_t mask = 1; mask < (1u << b); ++mask)
    if (std::popcount(mask) >= 2) words.push_back(mask);
  std::sort(words.begin(), words.end(), [](std::uint32_t a, std::uint32_t b2) {
    if (std::popcount(a) != std::popcount(b2))
      return std::popcount(a) > std::popcount(b2);
    return a < b2;
  });
  auto labels = fracfact::default_factor_labels(m);
  std::vector<fracfact::GeneratorSpec> gens;
  for (int g = 0; g < m - b; ++g)
    gens.push_back({labels[static_cast<std::size_t>(b + g)],
                    fracfact::FactorWord{words[static_cast<std::size_t>(g)]}});
  return fracfact::build_design(b, gens, basics);
}

// Writes one raw-response fixture per (n, m, replicate) under `dir`.
// Replicates vary the formatting (fences, missing terminators, plain CSV) so
// the repair pipeline is exercised end to end; the design itself is fixed
// per cell, so all replicates stay compliant.
inline void write_mock_fixtures(const std::string& dir, int replicates = 10) {
  namespace ff = fracfact;
  for (const auto& task : ff::benchmark_grid()) {
    auto design = fixture_design(task.n, task.m);
    std::string dialect = ff::emit_design_csv(design, true);
    std::string plain = ff::emit_design_csv(design, false);
    for (int rep = 1; rep <= replicates; ++rep) {
      std::string body = dialect;
      if (rep == 3) body = "```csv\n" + dialect + "```\n";
      if (rep == 5) {
        body = dialect;
        auto pos = body.rfind("\\\\\n");
        if (pos != std::string::npos) body.erase(pos, 2);
      }
      if (rep == 7) body = plain;
      std::ofstream out(dir + "/n" + std::to_string(task.n) + "_m" +
                            std::to_string(task.m) + "_rep" +
                            std::to_string(rep) + ".txt",
                        std::ios::binary);
      out << body;
    }
  }
}

// Word-count oracle by direct definition: for every size-k column subset,
// square the sum of the row-wise product column.
inline fracfact::Rational word_count_oracle(const fracfact::DesignTable& d,
                                            int k) {
  int n = d.n(), m = d.m();
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  long long total = 0;
  for (;;) {
    long long j_sum = 0;
    for (int r = 0; r < n; ++r) {
      int prod = 1;
      for (int c : idx)
        prod *= d.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      j_sum += prod;
    }
    total += j_sum * j_sum;
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int d2 = pos + 1; d2 < k; ++d2)
      idx[static_cast<std::size_t>(d2)] = idx[static_cast<std::size_t>(d2 - 1)] + 1;
  }
  return fracfact::Rational(fracfact::BigInt{total},
                            fracfact::BigInt{static_cast<long long>(n) * n});
}

}  // namespace testsupport
