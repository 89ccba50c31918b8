#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdea {

// Base error. Every throw site uses one of the categorized subclasses below;
// the CLI maps category() to its exit code (see README).
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

// Genome length/kind mismatch between operands of a variation operator.
class RepresentationError : public Error {
public:
    explicit RepresentationError(const std::string& what) : Error("representation", what) {}
};

// Invalid configuration or out-of-range argument.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error("parameter", what) {}
};

// Malformed input text; line() is 1-based when known, 0 otherwise.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error("parse", line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Objective evaluation failed (external evaluator crash, timeout, launch failure).
class EvaluationError : public Error {
public:
    explicit EvaluationError(const std::string& what) : Error("evaluation", what) {}
};

// Wire-protocol violation (bad handshake, malformed message, NaN result).
class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& what) : Error("protocol", what) {}
};

} // namespace hdea
