#pragma once

#include <stdexcept>
#include <string>

namespace transducer {

/// Base of every error raised by the library.
class TransducerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a physical formula.
class DomainError : public TransducerError {
 public:
  using TransducerError::TransducerError;
};

/// No stable equilibrium exists: the bias is past the pull-in instability.
class PullInError : public TransducerError {
 public:
  PullInError(const std::string& what, double bias_voltage)
      : TransducerError(what), bias_voltage_(bias_voltage) {}
  double bias_voltage() const noexcept { return bias_voltage_; }

 private:
  double bias_voltage_;
};

/// The membrane capacitance alone exceeds the capacitance a target LC
/// frequency allows.
class TuningError : public TransducerError {
 public:
  using TransducerError::TransducerError;
};

/// Invalid configuration; `field` names the offending key (dotted path) and
/// `line` is 1-based, or 0 when unknown.
class ConfigError : public TransducerError {
 public:
  explicit ConfigError(const std::string& what, std::string field = {}, int line = 0)
      : TransducerError(format(what, field, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& what, const std::string& field, int line) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "'" + field + "': ";
    return out + what;
  }

  std::string field_;
  int line_;
};

/// Integrator step too coarse to resolve the fastest photon mode.
class StepSizeError : public TransducerError {
 public:
  using TransducerError::TransducerError;
};

/// A fidelity threshold was not reached within the allotted time.
class NotReached : public TransducerError {
 public:
  NotReached(const std::string& what, double achieved_maximum)
      : TransducerError(what), achieved_maximum_(achieved_maximum) {}
  double achieved_maximum() const noexcept { return achieved_maximum_; }

 private:
  double achieved_maximum_;
};

}  // namespace transducer
