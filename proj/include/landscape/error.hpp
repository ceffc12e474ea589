#pragma once

#include <stdexcept>
#include <string>

namespace landscape {

// Numeric values double as process exit codes in the CLI (usage folds into 2).
enum class ErrorCode : int {
  kInternal = 1,
  kFormat = 2,
  kNumeric = 3,
  kUsage = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Caller passed something inconsistent: dimension mismatch, bad flag, even step count.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorCode::kUsage, what) {}
};

// Malformed input file or document.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorCode::kFormat, what) {}
};

// Non-finite loss, gradient or grid value.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::kNumeric, what) {}
};

// Formats a vector of coordinates as "(a, b, c)" for error messages.
std::string format_point(const double* values, std::size_t count);

}  // namespace landscape
