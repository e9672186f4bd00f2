#pragma once

#include <stdexcept>
#include <string>

namespace fri {

/// Base class for every error raised by the library. Callers that only need
/// to know "the reconstruction failed" catch this; the subclasses separate
/// caller mistakes from numerical failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The numerics could not produce a meaningful answer (rank collapse,
/// singular systems, degenerate filters).
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Malformed input files. The message carries the offending line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace fri
