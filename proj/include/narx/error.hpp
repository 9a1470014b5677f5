#pragma once

#include <stdexcept>
#include <string>

namespace narx {

/// Base of every error raised by the library. The CLI maps the concrete
/// type onto its exit status.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual int exit_code() const noexcept = 0;
};

/// Invalid configuration or violated precondition on user-supplied settings.
class ValidationError : public Error {
public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 1; }
};

/// Malformed, missing or inconsistent input data.
class DataError : public Error {
public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Ill-conditioned systems, divergent simulations, integrator failure.
class NumericalError : public Error {
public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

}  // namespace narx
