#pragma once

#include <stdexcept>
#include <string>

namespace hcn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (negative gain, empty sample set, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configuration is structurally fine but unusable for the requested operation.
class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double best_estimate, double error_estimate)
        : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// Every tier is excluded, so the aggregate interference is identically zero.
class DegenerateInterference : public Error {
public:
    using Error::Error;
};

/// Conditioning on an event of probability zero (e.g. p_k = 0).
class UndefinedConditional : public Error {
public:
    using Error::Error;
};

}  // namespace hcn
