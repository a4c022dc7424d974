#ifndef CAUSAL_RESAMPLE_ERRORS_HPP
#define CAUSAL_RESAMPLE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace causal_resample {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters: graph specs, plan settings, experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A graph or model violates its structural invariants (cycles, stray coefficients).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An API was called outside its contract (wrong input kind, bad arguments).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data cannot support the requested computation, or failed to parse.
class DataError : public Error {
 public:
  using Error::Error;
};

// A parent set cannot be scored (singular block, too many parents for n).
class ScoringError : public Error {
 public:
  using Error::Error;
};

}  // namespace causal_resample

#endif  // CAUSAL_RESAMPLE_ERRORS_HPP
