#pragma once

#include <stdexcept>
#include <string>

namespace flexquad {

/// Invalid or non-finite input outside an operation's domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Requested deflection angle has no non-negative real thrust solution.
class UnreachableDeflectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The 4x4 allocation subsystem is singular.
class AllocationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Deflections left the quasi-static validity region during an analysis
/// that requires it (stability derivatives).
class ValidityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Vehicle inverted or state became non-finite; the run cannot continue.
class SimulationAbort : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A trace never reached the steady-state band required by a metric.
class NoConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Scenario file failed to parse or validate.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace flexquad
