#pragma once

#include <stdexcept>
#include <string>

namespace rwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Input data violates a structural requirement (duplicate points, bad file).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Cut with an empty or full vertex set.
class InvalidCut : public Error {
 public:
  using Error::Error;
};

/// Model-specific operation requested for the wrong model.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// Model 2 on a single point: all weights vanish.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

/// Exhaustive routine asked to run above its configured size limit.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

/// Stored rate graph is not connected.
class DisconnectedStateSpace : public Error {
 public:
  using Error::Error;
};

/// Requested geometry admits no cube of the given scale.
class ScaleError : public Error {
 public:
  using Error::Error;
};

/// No good cube anywhere inside the box.
class EmptyEnvironment : public Error {
 public:
  using Error::Error;
};

/// Integration range not covered by a profile.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver did not converge.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Not enough data for a fit.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

}  // namespace detail
}  // namespace rwlab
