#pragma once

#include <optional>
#include <utility>

#include "matchprior/model.hpp"

namespace matchprior {

// Result of an (unconstrained or constrained) maximum-likelihood fit.
// converged implies gradient_norm < 1e-8; for constrained fits the norm
// covers the nuisance component only.
struct FitResult {
    ParamPoint point;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
};

// Unconstrained MLE. Uses the model's closed form when available,
// otherwise damped Newton iteration on the score starting from init (the
// model's initial_guess when absent). Non-convergence returns the best
// iterate with converged=false rather than throwing. Throws
// SeparationDetected when an iterate exceeds the model's estimate bound,
// DomainViolation when the line search cannot stay in the domain.
FitResult mle(const ModelSpec& model, const Dataset& data,
              std::optional<ParamPoint> init = std::nullopt);

// Constrained MLE of the nuisance parameter with psi fixed at psi0, by
// 1-d Newton with the same convergence contract as mle.
FitResult constrained_mle(const ModelSpec& model, const Dataset& data, double psi0,
                          std::optional<double> init_lambda = std::nullopt);

// Signed root of the likelihood-ratio statistic for testing psi = psi0:
// sign(psihat - psi0) * sqrt(2 {l(what) - l(psi0, lambdahat0)}). The
// radicand is clamped at zero when within -1e-10 of zero; anything below
// that throws NegativeRadicand (it signals optimizer failure).
double signed_root(const FitResult& full, const FitResult& constrained, double psi0);
double signed_root(const ModelSpec& model, const Dataset& data, double psi0);

// Curvature factors of the tail adjustment: the scalar -d2l/dlambda2 at
// the constrained fit omega0 and the determinant of -hessian at the full
// fit omega_hat, in that order. Throws NonPositiveCurvature when either
// is not strictly positive.
std::pair<double, double> t_determinants(const ModelSpec& model, const Dataset& data,
                                         const ParamPoint& omega_hat,
                                         const ParamPoint& omega0);

}  // namespace matchprior
