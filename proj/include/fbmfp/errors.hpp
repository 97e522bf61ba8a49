#pragma once

#include <stdexcept>
#include <string>

namespace fbmfp {

/// Broad failure classes. The CLI maps them onto exit codes
/// (invalid input -> 2, numerical failure -> 3).
enum class ErrorClass { invalid_input, numerical };

/// Base for every error thrown by the library. `reason()` is a short
/// machine-readable token (e.g. "quadrature_failure").
class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string reason, const std::string& what)
        : std::runtime_error(what), cls_(cls), reason_(std::move(reason)) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    ErrorClass cls_;
    std::string reason_;
};

/// Arguments outside the supported regime.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what)
        : Error(ErrorClass::invalid_input, "domain_error", what) {}
};

class NumericalError : public Error {
public:
    NumericalError(std::string reason, const std::string& what)
        : Error(ErrorClass::numerical, std::move(reason), what) {}
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : NumericalError("quadrature_failure", what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// A denominator or argument hit a pole.
class SingularityError : public NumericalError {
public:
    explicit SingularityError(const std::string& what)
        : NumericalError("singularity", what) {}
};

/// Laplace transform evaluated left of its abscissa of convergence.
class DivergenceError : public NumericalError {
public:
    explicit DivergenceError(const std::string& what)
        : NumericalError("divergence", what) {}
};

/// The weakly singular flux kernel is not integrable at some node.
class NonIntegrableKernelError : public NumericalError {
public:
    explicit NonIntegrableKernelError(const std::string& what)
        : NumericalError("non_integrable_kernel", what) {}
};

class IllConditionedError : public NumericalError {
public:
    explicit IllConditionedError(const std::string& what)
        : NumericalError("ill_conditioned", what) {}
};

/// Every requested inversion method failed.
class InversionError : public NumericalError {
public:
    explicit InversionError(const std::string& what)
        : NumericalError("inversion_failure", what) {}
};

/// Finite-difference integrator detected loss of stability or conservation.
class InstabilityError : public NumericalError {
public:
    explicit InstabilityError(const std::string& what)
        : NumericalError("instability", what) {}
};

}  // namespace fbmfp
