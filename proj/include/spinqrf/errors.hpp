#pragma once

#include <stdexcept>
#include <string>

namespace spinqrf {

/// Malformed or inconsistent input: dimensions, non-unit vectors, bad frames.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value falls outside the domain an operation is defined on
/// (function domains, gimbal-locked frames where they are excluded).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested combination has no representation in this library,
/// e.g. a reflection acting on a vector-form spin state.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A verification precondition failed; carries the measured deviation.
class VerificationError : public std::runtime_error {
public:
    VerificationError(const std::string& what, double deviation)
        : std::runtime_error(what), deviation_(deviation) {}

    double deviation() const noexcept { return deviation_; }

private:
    double deviation_;
};

}  // namespace spinqrf
