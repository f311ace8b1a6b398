#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tpms_scaffold {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the unit cube / knot range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Structural inconsistency: knot counts, grid dimensions, index ranges.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Boundary surface point with vanishing normal.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Closure produced a mesh whose edges are not paired; carries the offending edges.
class ClosureError : public Error {
public:
    ClosureError(const std::string& what, std::vector<std::pair<int, int>> edges)
        : Error(what), edges_(std::move(edges)) {}
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

private:
    std::vector<std::pair<int, int>> edges_;
};

} // namespace tpms_scaffold
