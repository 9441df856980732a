#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sumbench {

enum class ErrorCode {
  validation,
  out_of_range,
  not_found,
  parse,
  precondition,
  transport,
  protocol,
  conflict,
  busy,
  limit,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::parse: return "parse";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::transport: return "transport";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::busy: return "busy";
    case ErrorCode::limit: return "limit";
  }
  return "unknown";
}

// Every failure the library reports is an Error carrying one of the codes
// above; the service layer maps codes onto HTTP statuses and the CLI onto
// exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by from_markup; offset is the code point position of the offending
// marker in the marked-up input.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(ErrorCode::parse, message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// A failed call to an external model. The caller may retry with the bundled
// baseline.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorCode::transport, message) {}

  static constexpr std::string_view fallback() { return "baseline"; }
};

}  // namespace sumbench
