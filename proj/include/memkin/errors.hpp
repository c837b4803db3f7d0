#pragma once

#include <stdexcept>
#include <string>

namespace memkin {

/// Base class for all errors thrown by the library.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed netlist or scenario input. Carries a 1-based line number when known.
class parse_error : public error {
  public:
    parse_error(int line, const std::string& what)
        : error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// Ill-posed circuit: floating subcircuit, singular conductance system, ...
class topology_error : public error {
  public:
    using error::error;
};

/// Network too large for full-state-space operation.
class capacity_error : public error {
  public:
    using error::error;
};

/// Requested tolerance could not be met within the step/depth budget.
class accuracy_error : public error {
  public:
    using error::error;
};

/// Closed-form expression undefined because of (near-)equal decay rates.
class degeneracy_error : public error {
  public:
    using error::error;
};

/// Fixed-step simulation asked to run with dt * rate > 1 at the initial state.
class step_size_error : public error {
  public:
    using error::error;
};

/// Mean switching time diverges (a zero transition rate blocks the chain).
class infinite_time_error : public error {
  public:
    using error::error;
};

/// Symmetric chain reduction requested for a network that does not admit it.
class not_reducible_error : public error {
  public:
    using error::error;
};

}  // namespace memkin
