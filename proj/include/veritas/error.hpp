#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace veritas {

enum class ErrorKind {
  invalid_argument,
  undefined_statistic,
  unsupported_size,
  degenerate_sample,
  insufficient_data,
  alignment_error,
  archive_corrupt,
  internal_inconsistency,
  trial_cap_exceeded,
  invalid_manifest,
  io_error,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace veritas
