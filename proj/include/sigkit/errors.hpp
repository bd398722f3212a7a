#pragma once

#include <stdexcept>
#include <string>

namespace sigkit {

// Base for all library failures. exit_code() is what the CLI returns.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const { return 2; }
};

class InputError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

} // namespace sigkit
