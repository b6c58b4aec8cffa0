#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hrvkit {

enum class ErrorKind {
  parameter,
  input_too_short,
  insufficient_beats,
  insufficient_data,
  empty_after_cleaning,
  insufficient_cohort,
  schema,
  format,
  empty_input,
  io,
  usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::input_too_short: return "input too short";
    case ErrorKind::insufficient_beats: return "insufficient beats";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::empty_after_cleaning: return "empty after cleaning";
    case ErrorKind::insufficient_cohort: return "insufficient cohort";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::format: return "format error";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::usage: return "usage error";
  }
  return "error";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix, for re-wrapping with more context.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

// CLI exit status: 1 usage/configuration, 2 input format, 3 computation.
constexpr int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::parameter:
      return 1;
    case ErrorKind::format:
    case ErrorKind::empty_input:
    case ErrorKind::schema:
    case ErrorKind::io:
      return 2;
    default:
      return 3;
  }
}

}  // namespace hrvkit
