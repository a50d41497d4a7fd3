#pragma once

#include <stdexcept>
#include <string>

namespace sisctl {

enum class ErrorKind {
  Domain,            // argument outside the state space or a parameter domain
  Validation,        // configuration violates a type invariant
  Parse,             // malformed configuration text or override
  Singular,          // linear system cannot be solved
  InsufficientData,  // not enough samples for a statistic
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by solve_tridiagonal; carries the row where elimination broke down.
class SingularSystemError : public Error {
 public:
  SingularSystemError(std::size_t row, const std::string& what)
      : Error(ErrorKind::Singular, what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace sisctl
