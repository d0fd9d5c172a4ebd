#pragma once

#include <stdexcept>

namespace vaac {

// Bad arguments: dimension mismatches, out-of-domain inputs, broken invariants.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An episode exceeded the configured step bound.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A linear system that should be regular is singular: the policy may not reach
// the terminal state, or a projection is rank deficient under its weighting.
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Learned quantities stopped being finite.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed model or config documents.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vaac
