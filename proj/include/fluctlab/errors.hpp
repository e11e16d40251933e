#ifndef FLUCTLAB_ERRORS_HPP
#define FLUCTLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fluctlab {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched matrix or channel dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Composite dimension exceeds the configured maximum.
class SizeError : public Error {
public:
    using Error::Error;
};

// Parameter outside its admissible range (probabilities, temperatures, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Overflow or loss of representability in a numeric evaluation.
class RangeError : public Error {
public:
    using Error::Error;
};

// A caller violated an operation's precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

// A value fails its own structural invariants (non-Hermitian input,
// incomplete measurement, inconsistent Kraus shapes, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Eigen-solver failure, reported with the residual that triggered it.
class SolverError : public Error {
public:
    using Error::Error;
};

// Malformed configuration or data file.
class ParseError : public Error {
public:
    using Error::Error;
};

// Filesystem failure while reading or writing.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fluctlab

#endif
