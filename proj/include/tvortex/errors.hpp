#pragma once

#include <stdexcept>
#include <string>

namespace tvortex {

// Base for every failure raised by the library. The CLI maps these onto exit
// codes, so each subclass corresponds to one documented condition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class SingularPoint : public Error {
public:
    using Error::Error;
};

class BadCutoff : public Error {
public:
    using Error::Error;
};

class CollisionError : public Error {
public:
    using Error::Error;
};

class InconsistentCirculation : public Error {
public:
    using Error::Error;
};

class CoreUnresolved : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace tvortex
