#pragma once

#include <stdexcept>
#include <string>

namespace cfpe {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Basis mismatch, duplicate factor names, missing factors.
class StructuralError : public Error {
public:
    using Error::Error;
};

// Out-of-range or otherwise invalid numeric parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Operation undefined for the given input (zero vector, zero coupling ray).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Pre- and post-selected states are orthogonal, so the weak value or
// post-selected pointer state does not exist.
class OrthogonalEnsembleError : public Error {
public:
    using Error::Error;
};

// A discretization cannot represent the requested evolution faithfully.
class NumericQualityError : public Error {
public:
    using Error::Error;
};

}  // namespace cfpe
