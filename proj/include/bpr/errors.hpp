#pragma once

#include <stdexcept>
#include <string>

namespace bpr {

// Exit-status taxonomy used by the CLI: 2 config, 3 data, 4 numerical.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Inconsistent or out-of-range settings supplied by a caller.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed input data (bad CSV cell, missing column, non-finite entry).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// Numerical failure (Cholesky breakdown, non-convergence where fatal).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg, int index = -1)
      : Error(msg), index_(index) {}
  // For Cholesky failures: index of the leading minor that is not
  // positive definite (0-based), or -1 when not applicable.
  int index() const { return index_; }

 private:
  int index_;
};

}  // namespace bpr
