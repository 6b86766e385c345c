#pragma once

#include <stdexcept>
#include <string>

namespace supnc {

// Base class for every error thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact integer arithmetic would wrap the 128-bit accumulator.
struct arithmetic_overflow : error {
  using error::error;
};

// A caller-supplied value violates an operation precondition.
struct invalid_argument : error {
  using error::error;
};

// Requested word length or expansion power exceeds the supported bound.
struct size_limit_exceeded : error {
  using error::error;
};

// The state has numerically zero norm and cannot be normalized.
struct degenerate_state : error {
  using error::error;
};

// The witness is undefined for the given state (e.g. zero mean photon number).
struct undefined_witness : error {
  using error::error;
};

// Requested moment order exceeds what the provider can supply.
struct order_limit_exceeded : error {
  using error::error;
};

// A provider returned values violating the provider contract.
struct inconsistent_provider : error {
  using error::error;
};

// No admissible Fock cutoff exists below the hard cap.
struct cutoff_infeasible : error {
  using error::error;
};

// A comparison-path normalization evaluates to zero and cannot divide.
struct degenerate_denominator : error {
  using error::error;
};

// A file could not be opened, read, or written.
struct io_error : error {
  using error::error;
};

}  // namespace supnc
