#pragma once

#include <stdexcept>
#include <string>

namespace arakelov {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A floating-point refinement or a rationalization step could not reach
/// the required accuracy.
class NumericPrecisionError : public Error {
public:
    using Error::Error;
};

/// The defining polynomial does not have three real roots.
class UnsupportedSignatureError : public Error {
public:
    using Error::Error;
};

class ReducibleError : public Error {
public:
    using Error::Error;
};

class NotGaloisError : public Error {
public:
    using Error::Error;
};

/// Gram matrix not positive definite, or dependent basis vectors.
class DegenerateLatticeError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain where the operation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

class SearchExhaustedError : public Error {
public:
    using Error::Error;
};

} // namespace arakelov
