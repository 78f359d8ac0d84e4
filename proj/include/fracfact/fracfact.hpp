#pragma once

// Umbrella header: two-level fractional factorial design construction,
// evaluation, minimum-aberration search, and the replicated LLM benchmark
// harness.

#include "fracfact/benchmark.hpp"
#include "fracfact/bigint.hpp"
#include "fracfact/client.hpp"
#include "fracfact/criteria.hpp"
#include "fracfact/csv.hpp"
#include "fracfact/design.hpp"
#include "fracfact/errors.hpp"
#include "fracfact/prompt.hpp"
#include "fracfact/provider.hpp"
#include "fracfact/rational.hpp"
#include "fracfact/reference.hpp"
#include "fracfact/regular.hpp"
#include "fracfact/report.hpp"
#include "fracfact/response_parse.hpp"
#include "fracfact/search.hpp"
#include "fracfact/validate.hpp"
