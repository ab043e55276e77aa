#pragma once

#include <stdexcept>
#include <string>

namespace pzlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveError : Error {
  explicit NonPositiveError(const std::string& name)
      : Error("parameter must be positive: " + name), name(name) {}
  std::string name;
};

struct OutOfRangeError : Error {
  explicit OutOfRangeError(const std::string& name)
      : Error("parameter out of range: " + name), name(name) {}
  std::string name;
};

struct MissingKeyError : Error {
  explicit MissingKeyError(const std::string& key)
      : Error("missing key: " + key), key(key) {}
  std::string key;
};

struct SizeMismatchError : Error {
  explicit SizeMismatchError(const std::string& what) : Error("size mismatch: " + what) {}
};

struct NonPositiveDtError : Error {
  NonPositiveDtError() : Error("time step must be positive") {}
};

struct SolverSingularError : Error {
  explicit SolverSingularError(const std::string& what, double lambda = 0.0)
      : Error("singular linear system: " + what), lambda(lambda) {}
  double lambda;
};

struct CaseMismatchError : Error {
  explicit CaseMismatchError(const std::string& what) : Error("case mismatch: " + what) {}
};

struct RegimeMismatchError : Error {
  explicit RegimeMismatchError(const std::string& what) : Error("regime mismatch: " + what) {}
};

struct InconsistentInputsError : Error {
  explicit InconsistentInputsError(const std::string& what)
      : Error("inconsistent inputs: " + what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

}  // namespace pzlab
