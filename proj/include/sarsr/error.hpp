#pragma once

#include <stdexcept>
#include <string>

namespace sarsr {

enum class ErrorKind {
  io,
  format,
  size_mismatch,
  odd_dimension,
  too_small,
  invalid_argument,
  dimension_mismatch,
  empty_training_set,
  divergence,
  config,
};

/// Single exception type for the library; `kind()` lets callers (CLI, bindings)
/// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace sarsr
