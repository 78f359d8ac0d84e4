#pragma once

#include <string>
#include <string_view>

namespace fracfact {

// Design-construction prompt. Stored verbatim as an asset; rendering only
// substitutes the two numeric sites, never rephrases.
inline constexpr std::string_view kDesignPromptTemplate =
    "You are an expert in the subfield of statistics called design of "
    "experiments. Your goal is to construct a two-level fractional factorial "
    "design with maximum resolution and minimum aberration. The number of "
    "factors is {m} and the number of runs is {n}. The factors have two "
    "levels coded as '-1' and '1'. You will think step by step about how to "
    "construct the design. However, you will only generate a table "
    "containing the design. You will not generate any text explaining the "
    "table or your answer. The table must be in a comma-separated values "
    "(CSV) format. Specifically, the values in the table must be separated "
    "by ',' and each row must end with '\\\\'. In the table, the first row "
    "will be used as a header row to label the factors using the letters of "
    "the English alphabet starting with 'A'. The first column will be called "
    "\"Run\" and used to count the number of runs starting at '1'. Each "
    "design cell (excluding the header and Run columns) must contain either "
    "'-1' or '1'. Construct the two-level fractional factorial design with "
    "{n} runs and {m} factors that has maximum resolution and minimum "
    "aberration.";

/// Pure text substitution of the factor and run counts into the template.
inline std::string render_prompt(int m, int n) {
  std::string out{kDesignPromptTemplate};
  const std::string m_str = std::to_string(m);
  const std::string n_str = std::to_string(n);
  for (std::size_t pos; (pos = out.find("{m}")) != std::string::npos;)
    out.replace(pos, 3, m_str);
  for (std::size_t pos; (pos = out.find("{n}")) != std::string::npos;)
    out.replace(pos, 3, n_str);
  return out;
}

}  // namespace fracfact
