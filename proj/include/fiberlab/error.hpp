#pragma once

#include <stdexcept>

namespace fiberlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejected inputs and violated call contracts.  CLI exit code 2.
struct InputError : Error {
    using Error::Error;
};

// A consequence of a theorem failed to hold.  Always a bug in this library,
// never a property of the input.  CLI exit code 1.
struct InvariantViolation : Error {
    using Error::Error;
};

struct ZeroInput : InputError { using InputError::InputError; };
struct ZeroElement : InputError { using InputError::InputError; };
struct FactorizationTooHard : InputError { using InputError::InputError; };
struct DimensionMismatch : InputError { using InputError::InputError; };
struct NonIntegerResult : InputError { using InputError::InputError; };
struct DegreeTooHigh : InputError { using InputError::InputError; };
struct OmegaTooLarge : InputError { using InputError::InputError; };
struct BadParameter : InputError { using InputError::InputError; };
struct CollisionDetected : InputError { using InputError::InputError; };
struct PoolExhausted : InputError { using InputError::InputError; };
struct BadExponent : InputError { using InputError::InputError; };
struct MissingKey : InputError { using InputError::InputError; };
struct EmptyDecomposition : InputError { using InputError::InputError; };
struct NoWitness : InputError { using InputError::InputError; };
struct InconsistentState : InputError { using InputError::InputError; };
struct BadInput : InputError { using InputError::InputError; };
struct ParseError : InputError { using InputError::InputError; };
struct IoError : InputError { using InputError::InputError; };
struct EmptyAfterSanitize : InputError { using InputError::InputError; };

}  // namespace fiberlab
