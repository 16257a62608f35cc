#pragma once

#include <optional>

#include "matchprior/inference.hpp"
#include "matchprior/prior.hpp"

namespace matchprior {

enum class Format { bn, lr };

// |R| below this is the removable singularity of both tail formats; the
// plain normal approximation is substituted there.
inline constexpr double r_eps = 1e-5;
// |T| below this makes the 1/T correction meaningless.
inline constexpr double t_eps = 1e-12;

// Both tail formats evaluated at (R, T), with the shared singularity
// policy applied jointly so the invariant near_singular => p_bn = p_lr =
// Phi(R) holds. p_bn and p_lr approximate the posterior upper-tail
// probability of {psi >= psi0}.
struct TailResult {
    double R = 0.0;
    double T = 0.0;
    double p_bn = 0.5;
    double p_lr = 0.5;
    bool near_singular = false;
    bool lr_clamped = false;
};

// How the prior ratio pi(w_hat)/pi(w0) is obtained: either by solving
// the matching-prior equation from an initial condition, or from a
// closed-form log-prior surface.
struct PriorChoice {
    std::optional<InitialCondition> ic;
    std::function<double(const ParamPoint&)> log_prior;
    TraceOptions trace{};
};

PriorChoice numeric_prior(InitialCondition ic, TraceOptions opts = {});
PriorChoice analytic_prior(std::function<double(const ParamPoint&)> log_prior);

double prior_log_ratio(const ModelSpec& m, const Dataset& data,
                       const PriorChoice& prior, const ParamPoint& w_hat,
                       const ParamPoint& w0);

// Tail value Phi{R + log(T/R)/R}; falls back to Phi(R) when |R| < r_eps
// or T/R <= 0.
double bn_tail(double R, double T);

// Tail value Phi(R) + phi(R)(1/R - 1/T), clamped to [0,1]; falls back to
// Phi(R) when |R| < r_eps or |T| < t_eps.
double lr_tail(double R, double T);

TailResult evaluate_tails(double R, double T);

// T = l_psi(psi0, lambdahat0) * sqrt(|-l_ll(w0)| / det(-l_ww(w_hat))) *
// pi(w_hat)/pi(w0). The *_from variant reuses fits the caller already
// has; both throw DegenerateFit when a fit did not converge.
double t_statistic(const ModelSpec& m, const Dataset& data, double psi0,
                   const PriorChoice& prior);
double t_statistic_from(const ModelSpec& m, const Dataset& data,
                        const FitResult& full, const FitResult& constrained,
                        const PriorChoice& prior);

TailResult tail_result(const ModelSpec& m, const Dataset& data, double psi0,
                       const PriorChoice& prior);
TailResult tail_result_from(const ModelSpec& m, const Dataset& data,
                            const FitResult& full, const FitResult& constrained,
                            double psi0, const PriorChoice& prior);

// one_sided is the tail approximation itself (small when the evidence
// points to psi < psi0); two_sided = min(1, 2 min(one_sided, 1 - one_sided)).
struct PValues {
    double one_sided = 0.5;
    double two_sided = 1.0;
};

PValues p_values(const TailResult& tails, Format format);
PValues p_values(const ModelSpec& m, const Dataset& data, double psi0,
                 const PriorChoice& prior, Format format);

struct CredibleInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Equal-tailed interval: endpoints solve tail(psi0) = (1+level)/2 and
// (1-level)/2, found by geometric bracket expansion away from the MLE
// (at most 60 expansions) followed by root finding.
CredibleInterval credible_interval(const ModelSpec& m, const Dataset& data,
                                   const PriorChoice& prior, double level,
                                   Format format = Format::bn);

}  // namespace matchprior
