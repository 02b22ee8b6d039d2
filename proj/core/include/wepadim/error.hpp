#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wepadim {

enum class ErrorKind {
  format,
  unsupported_dtype,
  io,
  manifest,
  size,
  config,
  shape,
  insufficient_data,
  numerical,
  model_compatibility,
  undefined_metric,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every library failure is reported through this type; `kind()` drives
/// the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace wepadim
