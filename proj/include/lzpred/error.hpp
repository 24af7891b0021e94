#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lzpred {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input. line() is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Structurally valid input that violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Unusable parameters or option combinations.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

// Label or code stream cannot be mapped back to its source.
class CodecError : public Error {
public:
    using Error::Error;
};

}  // namespace lzpred
