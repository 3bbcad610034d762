#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdboot {

/// Precondition violated by the caller (bad sizes, out-of-range parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical problem that depends on the data, e.g. a singular design.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// X^T X is singular or too ill-conditioned for a stable OLS solve.
class SingularDesign : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Non-fatal diagnostics (clipped eigenvalues, loose lambda_star).
/// The default handler writes to stderr; tests may install their own.
using WarningHandler = void (*)(std::string_view);
WarningHandler set_warning_handler(WarningHandler handler) noexcept;
void warn(std::string_view message);

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace hdboot
