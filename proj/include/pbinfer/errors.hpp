#ifndef PBINFER_ERRORS_HPP
#define PBINFER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pbinfer {

// Base class for everything this library throws on anticipated failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrix : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };

struct DidNotConverge : Error { using Error::Error; };
struct SeparationDetected : Error { using Error::Error; };

struct ZeroVariance : Error { using Error::Error; };
struct ZeroDenominator : Error { using Error::Error; };
struct FamilyUnsupported : Error { using Error::Error; };
struct InsufficientUnlabeled : Error { using Error::Error; };
struct InsufficientLabeled : Error { using Error::Error; };
struct EmptyInfluence : Error { using Error::Error; };

struct CalibrationFailed : Error { using Error::Error; };
struct FailureBudgetExceeded : Error { using Error::Error; };

struct CsvError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace pbinfer

#endif
