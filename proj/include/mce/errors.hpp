#pragma once

#include <stdexcept>
#include <string>

namespace mce {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// A configuration whose four amplitudes vanish has no mean field.
class DegenerateConfigurationError : public Error {
public:
    using Error::Error;
};

class GramSolveError : public Error {
public:
    GramSolveError(const std::string& what, double rcond)
        : Error(what), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

class InitError : public Error {
public:
    InitError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition_number() const noexcept { return condition_; }

private:
    double condition_;
};

class BudgetError : public Error {
public:
    using Error::Error;
};

class UnsupportedRegimeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace mce
