#pragma once

#include <stdexcept>
#include <string>

namespace tve {

enum class ErrorCode {
  NonInvertible,
  NotSpd,
  NonPositiveDeterminant,
  NonPositiveTemperature,
  NonPositiveCapacity,
  NegativeTemperatureInput,
  InvalidDimensions,
  UnknownTag,
  DegenerateElement,
  LineSearchFailed,
  MaxIterations,
  InfeasibleInit,
  CurveUndefined,
  MismatchedConfigs,
  ParseError,
  ValidationError,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

const char* error_code_name(ErrorCode code);

}  // namespace tve
