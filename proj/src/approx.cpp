#include "matchprior/approx.hpp"

#include <cmath>

namespace matchprior {

PriorChoice numeric_prior(InitialCondition ic, TraceOptions opts) {
    PriorChoice p;
    p.ic = std::move(ic);
    p.trace = opts;
    return p;
}

PriorChoice analytic_prior(std::function<double(const ParamPoint&)> log_prior) {
    PriorChoice p;
    p.log_prior = std::move(log_prior);
    return p;
}

double prior_log_ratio(const ModelSpec& m, const Dataset& data,
                       const PriorChoice& prior, const ParamPoint& w_hat,
                       const ParamPoint& w0) {
    if (prior.ic) {
        return log_prior_ratio(m, data, *prior.ic, w_hat, w0, prior.trace);
    }
    if (prior.log_prior) {
        return prior.log_prior(w_hat) - prior.log_prior(w0);
    }
    throw InputError("prior choice carries neither an initial condition nor a surface");
}

double bn_tail(double R, double T) {
    if (std::abs(R) < r_eps) return std_normal_cdf(R);
    const double ratio = T / R;
    if (!(ratio > 0.0)) return std_normal_cdf(R);
    return std_normal_cdf(R + std::log(ratio) / R);
}

double lr_tail(double R, double T) {
    if (std::abs(R) < r_eps || std::abs(T) < t_eps) return std_normal_cdf(R);
    const double raw = std_normal_cdf(R) + std_normal_pdf(R) * (1.0 / R - 1.0 / T);
    return std::min(std::max(raw, 0.0), 1.0);
}

TailResult evaluate_tails(double R, double T) {
    if (!std::isfinite(R) || !std::isfinite(T)) {
        throw NonFiniteValue("tail statistics must be finite");
    }
    TailResult out;
    out.R = R;
    out.T = T;
    out.near_singular =
        std::abs(R) < r_eps || !(T / R > 0.0) || std::abs(T) < t_eps;
    if (out.near_singular) {
        out.p_bn = out.p_lr = std_normal_cdf(R);
        return out;
    }
    out.p_bn = std_normal_cdf(R + std::log(T / R) / R);
    const double raw_lr =
        std_normal_cdf(R) + std_normal_pdf(R) * (1.0 / R - 1.0 / T);
    out.p_lr = std::min(std::max(raw_lr, 0.0), 1.0);
    out.lr_clamped = raw_lr < 0.0 || raw_lr > 1.0;
    return out;
}

double t_statistic_from(const ModelSpec& m, const Dataset& data,
                        const FitResult& full, const FitResult& constrained,
                        const PriorChoice& prior) {
    if (!full.converged || !constrained.converged) {
        throw DegenerateFit("tail statistics require converged fits");
    }
    const double score_psi = m.score(data, constrained.point).v1;
    const auto [c_nuisance, c_full] =
        t_determinants(m, data, full.point, constrained.point);
    const double log_ratio =
        prior_log_ratio(m, data, prior, full.point, constrained.point);
    return score_psi * std::sqrt(c_nuisance / c_full) * std::exp(log_ratio);
}

double t_statistic(const ModelSpec& m, const Dataset& data, double psi0,
                   const PriorChoice& prior) {
    const FitResult full = mle(m, data);
    const FitResult constrained = constrained_mle(m, data, psi0);
    return t_statistic_from(m, data, full, constrained, prior);
}

TailResult tail_result_from(const ModelSpec& m, const Dataset& data,
                            const FitResult& full, const FitResult& constrained,
                            double psi0, const PriorChoice& prior) {
    const double R = signed_root(full, constrained, psi0);
    const double T = t_statistic_from(m, data, full, constrained, prior);
    return evaluate_tails(R, T);
}

TailResult tail_result(const ModelSpec& m, const Dataset& data, double psi0,
                       const PriorChoice& prior) {
    const FitResult full = mle(m, data);
    const FitResult constrained = constrained_mle(m, data, psi0);
    return tail_result_from(m, data, full, constrained, psi0, prior);
}

PValues p_values(const TailResult& tails, Format format) {
    // The tail value itself is the one-sided p-value: with the signed
    // root oriented by sgn(psi_hat - psi0), the approximation rejects in
    // the lower tail (evidence of psi < psi0).
    PValues p;
    p.one_sided = format == Format::bn ? tails.p_bn : tails.p_lr;
    p.two_sided = std::min(1.0, 2.0 * std::min(p.one_sided, 1.0 - p.one_sided));
    return p;
}

PValues p_values(const ModelSpec& m, const Dataset& data, double psi0,
                 const PriorChoice& prior, Format format) {
    return p_values(tail_result(m, data, psi0, prior), format);
}

namespace {

// Bracket [a, b] with g(a) and g(b) of opposite signs, found by walking
// away from `start` in the given direction: halving the gap toward a
// finite domain boundary, doubling the step toward an infinite one.
std::pair<double, double> expand_bracket(const std::function<double(double)>& g,
                                         double start, double g_start,
                                         const Interval& dom, bool downward) {
    const double bound = downward ? dom.lo : dom.hi;
    double step = 0.5 * std::max(1.0, std::abs(start));
    double prev = start;
    for (int k = 0; k < 60; ++k) {
        double cand;
        if (std::isfinite(bound)) {
            cand = bound + (prev - bound) * 0.5;
        } else {
            cand = downward ? start - step : start + step;
            step *= 2.0;
        }
        const double g_cand = g(cand);
        if (std::isfinite(g_cand) && g_cand * g_start < 0.0) {
            return downward ? std::make_pair(cand, prev) : std::make_pair(prev, cand);
        }
        prev = cand;
    }
    throw BracketingFailure("no sign change within 60 bracket expansions");
}

}  // namespace

CredibleInterval credible_interval(const ModelSpec& m, const Dataset& data,
                                   const PriorChoice& prior, double level,
                                   Format format) {
    if (!(level > 0.0) || !(level < 1.0)) {
        throw InputError("credible level must be inside (0,1)");
    }
    const FitResult full = mle(m, data);
    if (!full.converged) throw DegenerateFit("full fit did not converge");
    const double psi_hat = full.point.psi;

    const auto tail_at = [&](double psi0) {
        const FitResult constrained = constrained_mle(m, data, psi0);
        const TailResult tr = tail_result_from(m, data, full, constrained, psi0, prior);
        return format == Format::bn ? tr.p_bn : tr.p_lr;
    };

    const double xtol = 1e-7 * std::max(1.0, std::abs(psi_hat));
    const auto solve_endpoint = [&](double target, bool downward) {
        const auto g = [&](double psi0) { return tail_at(psi0) - target; };
        const double g_hat = g(psi_hat);
        if (g_hat == 0.0) return psi_hat;
        const auto [lo, hi] = expand_bracket(g, psi_hat, g_hat, m.domain.psi, downward);
        return find_root(g, lo, hi, xtol);
    };

    CredibleInterval ci;
    // The tail is decreasing in psi0: it crosses (1+level)/2 below the
    // MLE and (1-level)/2 above it.
    ci.lo = solve_endpoint(0.5 * (1.0 + level), true);
    ci.hi = solve_endpoint(0.5 * (1.0 - level), false);
    return ci;
}

}  // namespace matchprior
