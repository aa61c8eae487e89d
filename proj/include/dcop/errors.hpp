#pragma once

#include <stdexcept>
#include <string>

namespace dcop {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arithmetic on finite utilities (or a rule's linear form) left the 64-bit range.
struct OverflowError : Error {
    using Error::Error;
};

struct UnboundVariableError : Error {
    using Error::Error;
};

struct OutOfDomainError : Error {
    using Error::Error;
};

// Malformed instance file. Positions are 1-based.
struct SyntaxError : Error {
    SyntaxError(int line, int column, const std::string& what)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

// Well-formed file that violates a model invariant (unknown id, duplicate, domain breach).
struct SemanticError : Error {
    using Error::Error;
};

struct InvalidParamsError : Error {
    using Error::Error;
};

struct UnknownTopologyError : Error {
    using Error::Error;
};

struct ScopeMismatchError : Error {
    using Error::Error;
};

// A separator combination was requested that the cache never recorded.
struct MissingEntryError : Error {
    using Error::Error;
};

struct InstanceTooLargeError : Error {
    using Error::Error;
};

struct NotADfsTraversalError : Error {
    using Error::Error;
};

// A runtime invariant was breached; indicates a bug, never an input problem.
struct ProtocolViolationError : Error {
    using Error::Error;
};

// Internal: a compute loop was asked to stop (deadline or cancellation).
struct CancelledError : Error {
    using Error::Error;
};

}  // namespace dcop
