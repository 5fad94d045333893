#pragma once

#include <stdexcept>
#include <string>

namespace mqsp {

enum class ErrorKind {
  Validation,
  DegreeOverflow,
  Domain,
  CrcViolation,
  Instability,
  NotConverged,
  Indefinite,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}

  ErrorKind kind() const { return kind_; }
  // Carries the offending magnitude: leaked coefficient, CRC deviation,
  // running condition number, last residual, ...
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

}  // namespace mqsp
