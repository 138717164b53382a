#pragma once

#include <stdexcept>
#include <string>

namespace orbitlab {

/// Base class for all certification failures raised by this library.
struct OrbitlabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A certified comparison could not be decided before the precision cap.
struct IndeterminatePrecision : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

/// A root or determinant enclosure was too wide to certify a sign.
struct PrecisionFailure : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

struct PreconditionViolated : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

struct RankDeficient : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

struct NotAUnit : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

struct MembershipFailure : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

struct ConfigError : OrbitlabError {
    using OrbitlabError::OrbitlabError;
};

} // namespace orbitlab
