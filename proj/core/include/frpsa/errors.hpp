#pragma once

#include <stdexcept>
#include <string>

namespace frpsa {

/// Failure category; maps onto the CLI exit codes.
enum class ErrorKind {
  Input,    ///< bad data, bad spec, bad arguments (exit 2)
  Numeric,  ///< non-convergence, singularity, divergence (exit 3)
  Io,       ///< unreadable/unwritable files (exit 4)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Input: return 2;
      case ErrorKind::Numeric: return 3;
      case ErrorKind::Io: return 4;
    }
    return 1;
  }

 private:
  ErrorKind kind_;
};

inline Error input_error(std::string message) {
  return Error(ErrorKind::Input, std::move(message));
}
inline Error numeric_error(std::string message) {
  return Error(ErrorKind::Numeric, std::move(message));
}
inline Error io_error(std::string message) {
  return Error(ErrorKind::Io, std::move(message));
}

}  // namespace frpsa
