#pragma once

#include <stdexcept>
#include <string>

namespace sidla {

/// Invalid user-supplied configuration (window, flags, preconditions).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A consistency check between two independent routes failed.
class VerificationError : public std::runtime_error {
 public:
  explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

/// Replay reached a state the coupling construction forbids.
class CouplingFault : public VerificationError {
 public:
  explicit CouplingFault(const std::string& what) : VerificationError(what) {}
};

/// The direct simulation hit its iteration budget before covering the window.
class SimulationLimit : public std::runtime_error {
 public:
  explicit SimulationLimit(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sidla
