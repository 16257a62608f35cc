#pragma once

#include <stdexcept>
#include <string>

namespace matchprior {

// Base class for all numerical failures raised by this library.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- numerics ---

// Adaptive ODE step fell below the minimum allowed fraction of the span,
// which normally means the right-hand side is singular on the path.
struct StepSizeUnderflow : NumericError {
    using NumericError::NumericError;
};

struct NonFiniteRhs : NumericError {
    using NumericError::NumericError;
};

struct NonFiniteIntegrand : NumericError {
    using NumericError::NumericError;
};

struct NonFiniteValue : NumericError {
    using NumericError::NumericError;
};

// find_root precondition f(lo)*f(hi) <= 0 failed.
struct NoSignChange : NumericError {
    using NumericError::NumericError;
};

// --- model / inference ---

struct DomainViolation : NumericError {
    using NumericError::NumericError;
};

struct SingularInformation : NumericError {
    using NumericError::NumericError;
};

// Logistic estimate drifted past the separation bound; the MLE is
// effectively infinite for this dataset.
struct SeparationDetected : NumericError {
    using NumericError::NumericError;
};

// 2{l(full) - l(constrained)} < 0 beyond rounding, i.e. an optimizer failure.
struct NegativeRadicand : NumericError {
    using NumericError::NumericError;
};

struct NonPositiveCurvature : NumericError {
    using NumericError::NumericError;
};

// --- prior ---

// A characteristic exited the parameter domain before reaching the
// initial curve.
struct PathLeftDomain : NumericError {
    using NumericError::NumericError;
};

// The initial curve is tangent to the characteristic direction at the
// traced base point, so the Cauchy data does not determine the solution.
struct TangencyDetected : NumericError {
    using NumericError::NumericError;
};

struct NonRealPower : NumericError {
    using NumericError::NumericError;
};

// --- approx ---

// Credible-interval endpoint search exhausted its bracket expansions.
struct BracketingFailure : NumericError {
    using NumericError::NumericError;
};

// A tail computation required a converged fit and did not get one.
struct DegenerateFit : NumericError {
    using NumericError::NumericError;
};

// Malformed user input: CSV schema violations, unknown preset names, bad
// flag values. Deliberately outside the NumericError hierarchy; the CLI
// maps it to its own exit status.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace matchprior
