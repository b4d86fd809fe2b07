#pragma once

#include <stdexcept>
#include <string>

namespace tdgan {

// Error taxonomy used across the library. All conditions that a caller can
// provoke through bad inputs throw one of these; internal invariant breaks
// use NumericError.

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error("shape error: " + what) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error("domain error: " + what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error("config error: " + what) {}
};

struct StateError : std::runtime_error {
    explicit StateError(const std::string& what) : std::runtime_error("state error: " + what) {}
};

struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error("protocol error: " + what) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error("numeric error: " + what) {}
};

struct ParseError : std::runtime_error {
    ParseError(size_t line, const std::string& what)
        : std::runtime_error("parse error at line " + std::to_string(line) + ": " + what), line_no(line) {}
    size_t line_no;
};

}  // namespace tdgan
