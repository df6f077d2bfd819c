#pragma once

#include <stdexcept>
#include <string>

namespace ccpi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Endpoints of two morphisms do not line up.
struct CompositionError : Error {
  using Error::Error;
};

// A value is not where it is required to be (unknown code, element outside a
// domain, base context mismatch, ...).
struct DomainError : Error {
  using Error::Error;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

struct AmbiguousRecovery : Error {
  using Error::Error;
};

// Universe-category functor data that fails its defining conditions.
struct ValidationError : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

}  // namespace ccpi
