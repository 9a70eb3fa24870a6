#pragma once

#include <stdexcept>
#include <string>

namespace cohlab {

/// Base class for all library errors. Every message names the violated
/// requirement and, where meaningful, the measured residual.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input validation failures (bad shapes, non-states, bad parameters).
struct InvalidInput : Error {
    using Error::Error;
};

struct NotSquare : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotHermitian : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotPsd : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct TraceNotOne : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotState : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotDistribution : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotNormalized : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadExponent : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadRank : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct WrongDim : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct BadPartition : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct LengthMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct OutOfRange : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct DegenerateInput : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct DimMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct DimensionMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct MixedOutputDims : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct InfeasibleShape : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotIncoherent : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotComplete : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct NotCoherent : InvalidInput {
    using InvalidInput::InvalidInput;
};

struct UnknownExperiment : InvalidInput {
    using InvalidInput::InvalidInput;
};

/// An iterative solver failed to reach its target accuracy.
struct NoConvergence : Error {
    using Error::Error;
};

/// Filesystem / serialization failures.
struct IoError : Error {
    using Error::Error;
};

}  // namespace cohlab
