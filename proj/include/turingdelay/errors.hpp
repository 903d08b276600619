#pragma once

#include <stdexcept>
#include <string>

namespace turingdelay {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Newton polish failed from every seed of a terminal rectangle.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Boundary winding number did not settle under refinement (root on or near the contour).
class RootCountUnstable : public Error {
public:
    using Error::Error;
};

class SingularEigenproblem : public Error {
public:
    using Error::Error;
};

class SimulationDiverged : public Error {
public:
    using Error::Error;
};

class NoSignChange : public Error {
public:
    using Error::Error;
};

class AllCensored : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class UnknownKey : public Error {
public:
    using Error::Error;
};

class InvalidValue : public Error {
public:
    using Error::Error;
};

class MissingRequired : public Error {
public:
    using Error::Error;
};

} // namespace turingdelay
