#pragma once

#include <functional>
#include <string>

#include "matchprior/model.hpp"
#include "matchprior/numerics.hpp"

namespace matchprior {

// Coefficients of the first-order matching-prior equation
// a(psi,lambda) z_psi + b(psi,lambda) z_lambda = d(psi,lambda) for the
// log prior z = log pi, built from the inverse expected information:
// a = sqrt(i^11), b = i^12 / sqrt(i^11),
// d = -[ d/dpsi sqrt(i^11) + d/dlambda (i^12 / sqrt(i^11)) ].
struct PdeCoefficients {
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
};

// Initial data selecting one member of the matching-prior family: a curve
// xi -> (Psi(xi), Lambda(xi)) carrying prescribed log-prior values Z(xi).
// Psi must be constant: the curve is the vertical line psi = s0 in the
// parameter plane, and a constant Psi offset merely relabels the
// characteristic parameter (the interval of integration translates and
// the offset cancels).
struct InitialCondition {
    std::function<double(double)> Psi;
    std::function<double(double)> Lambda;
    std::function<double(double)> Z;
    double s0 = 0.0;
    bool lambda_is_identity = false;  // Lambda(xi) = xi, skips root finding
    std::string name;
};

enum class TraceConvention {
    // Integrate the characteristic from the target point back to the
    // initial curve. Exact for models with nonzero cross-information.
    backward,
    // Read xi* directly off the target's lambda and integrate forward
    // from the initial curve. Coincides with backward when i^12 == 0;
    // kept as a compatibility switch for results produced under that
    // shortcut.
    forward,
};

struct TraceOptions {
    double rtol = default_ode_rtol;
    double atol = default_ode_atol;
    int n_panels = default_quad_panels;
    TraceConvention convention = TraceConvention::backward;
};

struct CharacteristicSolution {
    double xi_star = 0.0;
    OdeTrajectory lambda_path;     // lambda as a function of psi
    double z_initial = 0.0;        // Z(xi_star), the initial-curve datum
    double z_value = 0.0;          // log prior at the target point
    double path_integral = 0.0;    // quadrature of d/a along the path
    int quadrature_panels = 0;
};

// Coefficients at w. Uses the model's analytic information derivatives
// when present, central differences of the inverse-information entries
// otherwise. Throws SingularInformation when the information is not
// positive definite.
PdeCoefficients pde_coefficients(const ModelSpec& m, const Dataset& data,
                                 const ParamPoint& w);

// Solve for the log prior at `target` by the method of characteristics:
// trace dlambda/dpsi = b/a between the initial curve at psi = ic.s0 and
// the target, locate xi* on the initial curve, then accumulate
// z = Z(xi*) + integral of d/a along the traced path (Simpson on the
// dense ODE output). Throws PathLeftDomain when the characteristic exits
// the parameter domain and TangencyDetected when the initial curve is
// tangent to the characteristic direction at xi*.
CharacteristicSolution trace_characteristic(const ModelSpec& m, const Dataset& data,
                                            const InitialCondition& ic,
                                            const ParamPoint& target,
                                            const TraceOptions& opts = {});

// z(w_hat) - z(w0) with the initial curve re-anchored at psi = w0.psi, so
// the w0 evaluation degenerates to Z(xi*) and a single genuine
// characteristic trace is needed. Computed as
// [Z(xi_hat) - Z(xi_0)] + [path integral difference], so adding any
// constant to Z leaves the result unchanged exactly, not merely to
// rounding.
double log_prior_ratio(const ModelSpec& m, const Dataset& data,
                       const InitialCondition& ic, const ParamPoint& w_hat,
                       const ParamPoint& w0, const TraceOptions& opts = {});

// Correctness probe: a z_psi + b z_lambda - d at w, with z-derivatives by
// central differences of the supplied log-prior surface. The step is
// deliberately coarse (1e-4 scale) so quadrature noise in a numerically
// produced surface is damped instead of amplified.
double pde_residual(const ModelSpec& m, const Dataset& data,
                    const std::function<double(const ParamPoint&)>& log_prior,
                    const ParamPoint& w);

// Tunable initial log-prior family Z(xi) = -log{|xi - center|^q + 1},
// peaked at xi = center. The absolute value extends fractional powers
// evenly across the center, which keeps Z defined on both sides.
std::function<double(double)> z_family(double q, double center = -1.0);

// Named presets: "default" (Lambda identity, Z constant -1), "loglambda"
// (Z = -log xi), "qfam:<q>" (z_family with q parsed from the tail).
// Throws InputError for unknown names.
InitialCondition make_initial_condition(const std::string& name, double s0);

// Parse "p/q" exactly (integer numerator and denominator) or a plain
// decimal. Throws InputError on malformed text.
double parse_ratio(const std::string& text);

}  // namespace matchprior
