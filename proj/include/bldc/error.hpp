#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace bldc {

enum class ErrorCode {
  UnsupportedConversion,
  NonPositiveValue,
  NonFiniteValue,
  MismatchedFrames,
  SyntaxError,
  MissingRequiredField,
  UnitError,
  UnknownKey,
  InvalidValue,
  UnconvertibleKtConvention,
  WindingRequired,
  ConflictingSources,
  NonFiniteState,
  UnbalancedInput,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

/// Base of every error raised by the library. Each failure mode carries a
/// stable code so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::string token, const std::string& detail)
      : Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ": " + detail + " near '" + token + "'"),
        line_(line),
        token_(std::move(token)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t line_;
  std::string token_;
};

class MissingRequiredField : public Error {
 public:
  explicit MissingRequiredField(std::string field, const std::string& detail = {})
      : Error(ErrorCode::MissingRequiredField,
              "missing required field '" + field + "'" + (detail.empty() ? "" : ": " + detail)),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ConflictingSources : public Error {
 public:
  ConflictingSources(std::string parameter, double first, double second, const std::string& message)
      : Error(ErrorCode::ConflictingSources, message),
        parameter_(std::move(parameter)),
        first_(first),
        second_(second) {}

  const std::string& parameter() const noexcept { return parameter_; }
  /// The two disagreeing estimates, in resolution order.
  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }

 private:
  std::string parameter_;
  double first_;
  double second_;
};

class NonFiniteState : public Error {
 public:
  NonFiniteState(std::size_t step, double time)
      : Error(ErrorCode::NonFiniteState,
              "simulation diverged at step " + std::to_string(step) + " (t = " +
                  std::to_string(time) + " s)"),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

}  // namespace bldc
