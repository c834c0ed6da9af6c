#pragma once

#include <stdexcept>
#include <string>

namespace atraj {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input value (zero quaternion, non-positive focal length, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A point to be projected lies at or behind the camera plane.
class BehindCameraError : public Error {
public:
    using Error::Error;
};

/// Ray geometry admits no unique solution (parallel/identical rays, rank loss).
class DegenerateGeometryError : public Error {
public:
    DegenerateGeometryError(const std::string& what, double min_singular_ratio)
        : Error(what), min_singular_ratio(min_singular_ratio) {}
    double min_singular_ratio;
};

/// Fewer equations than unknowns for the requested model.
class UnderdeterminedError : public Error {
public:
    UnderdeterminedError(const std::string& what, long equations, long unknowns)
        : Error(what), equations(equations), unknowns(unknowns) {}
    long equations;
    long unknowns;
};

/// Nonlinear solve started from a point where residuals are not finite.
class InvalidStartError : public Error {
public:
    using Error::Error;
};

/// Levenberg-Marquardt damping grew past its ceiling without progress.
class SolverStalledError : public Error {
public:
    using Error::Error;
};

/// Bad configuration file or inconsistent scene description.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace atraj
