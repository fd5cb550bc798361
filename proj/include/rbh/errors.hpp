#pragma once

#include <stdexcept>
#include <string>

namespace rbh {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Iterative scheme (eigen solver, Newton, line search) did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// det F <= 0 at a quadrature point persisted after all load cutbacks.
class ElementInversionError : public Error {
public:
    using Error::Error;
};

/// Quadrature layouts of two fields (or a field and a mesh) do not match.
class LayoutMismatch : public Error {
public:
    using Error::Error;
};

class RankError : public Error {
public:
    using Error::Error;
};

/// Every quadrature point has cutoff weight zero.
class AllPointsExcluded : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rbh
