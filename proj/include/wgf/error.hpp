#pragma once

#include <stdexcept>
#include <string>

namespace wgf {

/// Argument outside the mathematical domain of an operation (ζ ∉ [0, m), p < 1, q ∉ [1, 2]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two grids or arrays that must agree in size do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed user input: configuration, CSV or JSON content, too few snapshots.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation called outside its stated hypotheses (wrong regime, wrong mass).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// ψ'' evaluated at the origin for q < 2.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An evolving state lost an invariant: ordering, finiteness.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordering of the pseudo-inverse was violated by a time step.
class MonotonicityError : public StateError {
 public:
  MonotonicityError(const std::string& what, double t, double suggested_dt)
      : StateError(what), t_(t), suggested_dt_(suggested_dt) {}

  double time() const noexcept { return t_; }
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double t_;
  double suggested_dt_;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Particle gradient requested where E_N is not differentiable (q_r = 1, coinciding particles).
class SubdifferentialError : public StateError {
 public:
  using StateError::StateError;
};

}  // namespace wgf
