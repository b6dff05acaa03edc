#pragma once

#include <stdexcept>
#include <string>

namespace vgtree {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the mathematical domain of the operation
/// (bad parameters, bad flags, too-short series, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The operation is well defined but not offered for this input
/// (e.g. American style through the European-only quadrature oracle).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// The computation started but could not deliver a trustworthy number.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NegativeProbabilityError : public NumericalError {
public:
    NegativeProbabilityError(const std::string& what, double skewness, double excess_kurtosis)
        : NumericalError(what), skewness_(skewness), excess_kurtosis_(excess_kurtosis) {}

    double skewness() const noexcept { return skewness_; }
    double excess_kurtosis() const noexcept { return excess_kurtosis_; }

private:
    double skewness_;
    double excess_kurtosis_;
};

/// Sample excess kurtosis is not positive: the VG family cannot fit it.
class NotVgFittableError : public DomainError {
public:
    using DomainError::DomainError;
};

class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace vgtree
