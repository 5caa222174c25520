#ifndef HAMM_ERRORS_HPP
#define HAMM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hamm {

// Base of every error raised by the library. The CLI maps all of these to
// exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (e.g. eval_at with a > 1).
class DomainError : public Error {
public:
    using Error::Error;
};

// Sample vector does not match the grid, or index out of range.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Invalid numeric parameter (negative lambda, r >= R, n < 2, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

// Expression evaluation hit a genuine domain violation (sqrt of a negative
// number, division by zero, ...).
class EvaluationError : public Error {
public:
    using Error::Error;
};

class IncompleteBoundsError : public Error {
public:
    using Error::Error;
};

// A declared coefficient derivative disagrees with finite differences.
class DerivativeMismatchError : public Error {
public:
    using Error::Error;
};

} // namespace hamm

#endif // HAMM_ERRORS_HPP
