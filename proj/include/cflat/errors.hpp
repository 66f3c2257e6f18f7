#pragma once

#include <stdexcept>
#include <string>

namespace cflat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Isotropic line with (v, rho v) too small, or a transported line that
/// cannot be normalised.
class DegenerateLine : public Error {
public:
    using Error::Error;
};

class DegenerateMetric : public Error {
public:
    using Error::Error;
};

class DegenerateCongruence : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

/// A structural identity (block shape, sign pattern) failed beyond tolerance.
class StructureError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ProjectionSingular : public Error {
public:
    using Error::Error;
};

class CurvatureDegenerate : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace cflat
