#pragma once

#include <stdexcept>
#include <string>

namespace monge {

enum class ErrorKind {
    domain,               // argument outside the mathematical domain
    parse,                // malformed state text or input file
    insufficient_coverage,
    grid,                 // grid too small / inconsistent layouts
    not_rotationally_symmetric,
    unsupported,          // method or norm not available for this input
    capacity,             // problem exceeds the dense cost-matrix cap
    solver,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::parse: return "parse";
    case ErrorKind::insufficient_coverage: return "insufficient coverage";
    case ErrorKind::grid: return "grid";
    case ErrorKind::not_rotationally_symmetric: return "not rotationally symmetric";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::solver: return "solver";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failure carrying the byte offset into the offending text.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& what)
        : Error(ErrorKind::parse, what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

} // namespace monge
