#pragma once

#include <stdexcept>

namespace qcert {

// Violated precondition: malformed argument, dimension mismatch, broken invariant.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A conditional branch whose squared norm fell below the degenerate threshold.
// Callers apply their documented zero-branch convention.
class DegenerateBranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested problem size exceeds a configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcert
