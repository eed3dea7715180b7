#ifndef PARKCP_ERROR_HPP
#define PARKCP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parkcp {

/// Malformed input text. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant (duplicate rows, parked car with speed, ...).
class ValidationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Infeasible or inconsistent configuration.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Degenerate geometry: collinear anchors, concentric circles, non-intersecting ranges.
class GeometryError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

} // namespace parkcp

#endif
