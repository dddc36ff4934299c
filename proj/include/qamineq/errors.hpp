#pragma once

#include <stdexcept>

namespace qamineq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };         // point outside a function's domain
struct RangeError : Error { using Error::Error; };          // value outside conv(f(I))
struct ArityError : Error { using Error::Error; };
struct WeightError : Error { using Error::Error; };
struct CompositionError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };
struct UnsupportedError : Error { using Error::Error; };
struct InconsistencyError : Error { using Error::Error; };  // conflicting evidence channels
struct IoError : Error { using Error::Error; };

}  // namespace qamineq
