#pragma once

#include <stdexcept>
#include <string>

namespace hadflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed point, space description, or configuration field.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation (t outside [0,1],
// degenerate comparison triangle, x = y where distinct points are needed).
class DomainError : public Error {
public:
    using Error::Error;
};

// API misuse such as mixing tangent vectors from different base points.
class UsageError : public Error {
public:
    using Error::Error;
};

// Step size outside the admissible range of the resolvent or scheme.
class StepSizeError : public Error {
public:
    using Error::Error;
};

// The requested computation is not available for this functional/space pair.
class CapabilityError : public Error {
public:
    using Error::Error;
};

// A moving target violated d_H(Y_t, Y_t') <= |t - t'|.
class ContractError : public Error {
public:
    ContractError(const std::string& what, double t, double t_prime)
        : Error(what), t_(t), t_prime_(t_prime) {}

    double t() const noexcept { return t_; }
    double t_prime() const noexcept { return t_prime_; }

private:
    double t_;
    double t_prime_;
};

// Grid oracle optimum sits on the boundary of its search region.
class RegionTooSmallError : public Error {
public:
    using Error::Error;
};

// Input data for an estimator is unusable (e.g. non-positive errors).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace hadflow
