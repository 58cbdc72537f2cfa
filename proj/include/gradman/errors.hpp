#pragma once

#include <stdexcept>
#include <string>

namespace gradman {

enum class ErrorKind {
  InvalidInput,
  NotAdmissible,
  Unsupported,
  DegreeOverflow,
  NotInvolutive,
  NonConstantSymbols,
  NonPolynomialFlatFrame,
  HypothesisFailed,
};

const char* error_kind_name(ErrorKind k);

class GradmanError : public std::runtime_error {
 public:
  GradmanError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gradman
