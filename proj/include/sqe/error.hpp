#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqe {

/// Process exit codes shared by the library error types and the CLI.
enum class ExitCode : int {
  kOk = 0,
  kInput = 2,
  kContract = 3,
  kResource = 4,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Bad parameters or malformed input data.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what, ExitCode::kInput) {}
};

/// A precondition on a mathematical object was violated (non-Hermitian input,
/// mismatched dimensions, an undefined matrix function, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(what, ExitCode::kContract) {}
};

/// Requested object exceeds a configured memory cap.
class ResourceLimit : public Error {
 public:
  explicit ResourceLimit(const std::string& what) : Error(what, ExitCode::kResource) {}
};

/// A state could not be represented in the requested truncated space.
class DimensionTooSmall : public ContractViolation {
 public:
  DimensionTooSmall(const std::string& what, std::ptrdiff_t required)
      : ContractViolation(what), required_(required) {}
  std::ptrdiff_t required_dim() const noexcept { return required_; }

 private:
  std::ptrdiff_t required_;
};

/// The post-selection projected the state (numerically) to zero.
class Annihilated : public ContractViolation {
 public:
  explicit Annihilated(const std::string& what) : ContractViolation(what) {}
};

}  // namespace sqe
