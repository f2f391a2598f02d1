#pragma once

#include <stdexcept>
#include <string>

namespace aperiodix {

enum class ErrorCode {
  InvalidRule,
  NotPrimitive,
  LengthLimit,
  EmptyWord,
  TooShort,
  SizeLimit,
  UnknownFamily,
  NoFixedPoint,
  Unrecognized,
  Overflow,
  IoError,
  InvalidArgument,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::LengthLimit: return "LengthLimit";
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::NoFixedPoint: return "NoFixedPoint";
    case ErrorCode::Unrecognized: return "Unrecognized";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace aperiodix
