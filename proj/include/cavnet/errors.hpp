#pragma once

#include <stdexcept>
#include <string>

namespace cavnet {

/// Invalid or inconsistent configuration values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state was passed to a transform whose input basis does not match.
struct BasisMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested sample time does not lie on the record's time grid.
struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An exact enumeration was requested beyond the configured size cap.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cavnet
