#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roughmerton {

/// Invalid parameters or arguments outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not deliver a trustworthy number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Finite-time explosion of a Volterra solve. `last_stable_node` is the
/// largest grid index whose value stayed below the cap.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, std::size_t last_stable_node)
      : NumericalError(what), last_stable_node_(last_stable_node) {}

  std::size_t last_stable_node() const noexcept { return last_stable_node_; }

 private:
  std::size_t last_stable_node_;
};

/// Misuse of a multi-stage pipeline (e.g. asking for conditions before solving).
class StagingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roughmerton
