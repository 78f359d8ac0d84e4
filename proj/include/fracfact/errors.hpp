#pragma once

#include <stdexcept>
#include <string>

namespace fracfact {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched lengths, out-of-range indices.
struct DimensionError : Error {
  using Error::Error;
};

// Fewer than two runs where a pairwise metric needs them.
struct InsufficientRunsError : Error {
  using Error::Error;
};

// Invalid construction or search specification (bad generator, m out of range).
struct SpecError : Error {
  using Error::Error;
};

// Word / CLI-notation parse failures.
struct WordParseError : Error {
  using Error::Error;
};

// Unreadable or malformed data files (designs, logs, reference stores).
struct DataError : Error {
  using Error::Error;
};

struct AggregationError : DataError {
  using DataError::DataError;
};

// Missing API keys, malformed provider configuration.
struct ConfigError : Error {
  using Error::Error;
};

// HTTP-level failure after retries are exhausted.
struct TransportError : Error {
  using Error::Error;
};

}  // namespace fracfact
