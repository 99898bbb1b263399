#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vemc {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Illegal character while tokenizing an expression; offset is the byte
/// position in the source string.
class LexError : public Error {
public:
    LexError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Malformed expression syntax; offset is the byte position of the offending
/// token (or end of input).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Unbound identifier or division by zero during expression evaluation.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter for a sampler, engine, or report.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The measurand coefficient is too close to zero to invert the model.
class SingularModelError : public Error {
public:
    using Error::Error;
};

/// A kernel failed the affine-in-measurand check.
class AffinityError : public Error {
public:
    using Error::Error;
};

/// A scenario definition or file is invalid.
class ScenarioError : public Error {
public:
    using Error::Error;
};

} // namespace vemc
