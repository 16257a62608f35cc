#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "matchprior/errors.hpp"
#include "matchprior/rng.hpp"

namespace matchprior {

// Parameter point (psi, lambda). psi is the interest parameter throughout;
// any reordering relative to a model's natural coordinates happens inside
// the model definition, never in the solvers.
struct ParamPoint {
    double psi = 0.0;
    double lambda = 0.0;
};

// Open interval, possibly unbounded on either side.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x > lo && x < hi; }
};

// Rectangular parameter domain.
struct Domain {
    Interval psi;
    Interval lambda;

    bool contains(const ParamPoint& w) const {
        return psi.contains(w.psi) && lambda.contains(w.lambda);
    }
};

// Symmetric 2x2 matrix in (psi, lambda) ordering.
struct Mat2 {
    double a11 = 0.0;  // psi,psi
    double a12 = 0.0;  // psi,lambda
    double a22 = 0.0;  // lambda,lambda

    double det() const { return a11 * a22 - a12 * a12; }
};

struct Vec2 {
    double v1 = 0.0;  // psi component
    double v2 = 0.0;  // lambda component
};

// Inverse of a symmetric 2x2 matrix. Throws SingularInformation when the
// determinant is not safely positive.
Mat2 inverse_info(const Mat2& m);

// Observed data: paired columns of equal length. Models that use a single
// response leave x as covariate values; the exponential-ratio model uses
// both columns as responses.
struct Dataset {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return y.size(); }
};

// A parametric model with scalar interest and scalar nuisance parameter.
// All functions take the full dataset so the same interface serves both
// likelihood evaluation and information computation. expected_info and its
// derivatives are per-observation-aggregate (already scaled by n).
struct ModelSpec {
    std::string name;

    Domain domain;

    std::function<double(const Dataset&, const ParamPoint&)> loglik;
    std::function<Vec2(const Dataset&, const ParamPoint&)> score;
    std::function<Mat2(const Dataset&, const ParamPoint&)> hessian;

    // Expected Fisher information i(psi, lambda) and its parameter
    // derivatives. The derivatives are optional; solvers fall back to
    // central differences when they are absent.
    std::function<Mat2(const Dataset&, const ParamPoint&)> expected_info;
    std::function<Mat2(const Dataset&, const ParamPoint&)> expected_info_dpsi;
    std::function<Mat2(const Dataset&, const ParamPoint&)> expected_info_dlambda;

    // Closed-form fits, when the model admits them. Absent entries route
    // the caller to the generic Newton optimizer.
    std::function<ParamPoint(const Dataset&)> closed_form_mle;
    std::function<double(const Dataset&, double)> closed_form_constrained;

    // Starting point for iterative fits.
    std::function<ParamPoint(const Dataset&)> initial_guess;

    // Simulate a dataset of size n at the given parameter point.
    std::function<Dataset(const ParamPoint&, std::size_t, Rng&)> simulate;

    // Iterative fits whose estimates exceed this magnitude are treated as
    // divergent (e.g. separation in a binary-response model).
    double estimate_bound = std::numeric_limits<double>::infinity();
};

// Two-sample exponential model: X_i ~ Exp(mean lambda/sqrt(psi)),
// Y_i ~ Exp(mean lambda*sqrt(psi)), n observations of each. psi > 0 is the
// mean ratio E[Y]/E[X]; lambda > 0 is the geometric mean scale. The
// expected information is diagonal, and the MLE and constrained MLE have
// closed forms.
ModelSpec exp_ratio_model();

// Binary logistic regression with one covariate: logit P(Y=1) =
// lambda + psi * x. The interest parameter is the slope; the intercept is
// the nuisance. Covariate values are fixed by design and cycled to length
// n during simulation.
ModelSpec logistic_model(std::vector<double> covariates);

}  // namespace matchprior
