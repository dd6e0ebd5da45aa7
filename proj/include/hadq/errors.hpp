#pragma once

#include <stdexcept>
#include <string>

namespace hadq {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameters : Error {
    using Error::Error;
};

struct GeometryMismatch : Error {
    using Error::Error;
};

struct EmptyConfiguration : Error {
    using Error::Error;
};

struct NoLeftParticle : Error {
    using Error::Error;
};

struct NoRightParticle : Error {
    using Error::Error;
};

// Two events or particles share a coordinate. Coincidences have measure
// zero under continuous sampling, so they are rejected instead of
// tie-broken.
struct PositionCollision : Error {
    using Error::Error;
};

struct UnstableQueue : Error {
    using Error::Error;
};

struct NotNested : Error {
    using Error::Error;
};

struct NotDisjoint : Error {
    using Error::Error;
};

struct TooFewSamples : Error {
    using Error::Error;
};

struct EmptyClass : Error {
    using Error::Error;
};

struct NoOriginParticle : Error {
    using Error::Error;
};

struct UnknownExperiment : Error {
    using Error::Error;
};

}  // namespace hadq
