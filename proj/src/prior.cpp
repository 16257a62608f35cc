#include "matchprior/prior.hpp"

#include <cmath>
#include <utility>

namespace matchprior {

namespace {

// Entry derivatives of the inverse information: d(M^-1) = -M^-1 dM M^-1.
// Only the entries the PDE coefficients need are returned.
struct InvEntryDerivs {
    double d11 = 0.0;  // derivative of i^11
    double d12 = 0.0;  // derivative of i^12
};

InvEntryDerivs inverse_entry_derivs(const Mat2& inv, const Mat2& dM) {
    const double k11 = inv.a11 * (dM.a11 * inv.a11 + dM.a12 * inv.a12) +
                       inv.a12 * (dM.a12 * inv.a11 + dM.a22 * inv.a12);
    const double k12 = inv.a11 * (dM.a11 * inv.a12 + dM.a12 * inv.a22) +
                       inv.a12 * (dM.a12 * inv.a12 + dM.a22 * inv.a22);
    return {-k11, -k12};
}

// Threshold under which a target is considered to sit on the initial
// curve, so no integration is needed.
constexpr double degenerate_span = 1e-12;

double solve_xi(const std::function<double(double)>& Lambda, double lambda_value) {
    // Natural first guess: xi at the same scale as lambda.
    const double xi0 = lambda_value;
    const auto g = [&](double xi) { return Lambda(xi) - lambda_value; };
    const double g0 = g(xi0);
    if (g0 == 0.0) return xi0;

    double step = 0.5 * std::max(1.0, std::abs(xi0));
    for (int k = 0; k < 60; ++k, step *= 2.0) {
        const double lo = xi0 - step;
        const double hi = xi0 + step;
        const double glo = g(lo);
        const double ghi = g(hi);
        if (std::isfinite(glo) && glo * g0 < 0.0) {
            return find_root(g, lo, xi0, 1e-12 * std::max(1.0, std::abs(xi0)));
        }
        if (std::isfinite(ghi) && ghi * g0 < 0.0) {
            return find_root(g, xi0, hi, 1e-12 * std::max(1.0, std::abs(xi0)));
        }
    }
    throw BracketingFailure("could not bracket xi on the initial curve");
}

void check_initial_curve(const ModelSpec& m, const Dataset& data,
                         const InitialCondition& ic, double xi_star,
                         double lambda_at_curve) {
    const double psi_slope = central_diff(ic.Psi, xi_star);
    if (std::abs(psi_slope) > 1e-6 * std::max(1.0, std::abs(ic.Psi(xi_star)))) {
        throw DomainViolation(
            "initial curve must have a constant psi-coordinate (vertical line)");
    }
    const double lambda_slope =
        ic.lambda_is_identity ? 1.0 : central_diff(ic.Lambda, xi_star);

    const PdeCoefficients c =
        pde_coefficients(m, data, ParamPoint{ic.s0, lambda_at_curve});
    const double cross = psi_slope * (c.b / c.a) - lambda_slope;
    if (std::abs(cross) <
        1e-10 + 1e-8 * (std::abs(psi_slope) + std::abs(lambda_slope))) {
        throw TangencyDetected(
            "initial curve is tangent to the characteristic direction");
    }
}

}  // namespace

PdeCoefficients pde_coefficients(const ModelSpec& m, const Dataset& data,
                                 const ParamPoint& w) {
    const Mat2 info = m.expected_info(data, w);
    const Mat2 inv = inverse_info(info);
    const double i11 = inv.a11;
    const double i12 = inv.a12;
    if (!(i11 > 0.0)) throw SingularInformation("i^11 must be positive");

    PdeCoefficients c;
    c.a = std::sqrt(i11);
    c.b = i12 / c.a;

    double d11_psi = 0.0;     // d i^11 / d psi
    double d11_lambda = 0.0;  // d i^11 / d lambda
    double d12_lambda = 0.0;  // d i^12 / d lambda
    if (m.expected_info_dpsi && m.expected_info_dlambda) {
        const InvEntryDerivs dp =
            inverse_entry_derivs(inv, m.expected_info_dpsi(data, w));
        const InvEntryDerivs dl =
            inverse_entry_derivs(inv, m.expected_info_dlambda(data, w));
        d11_psi = dp.d11;
        d11_lambda = dl.d11;
        d12_lambda = dl.d12;
    } else {
        d11_psi = central_diff(
            [&](double p) {
                return inverse_info(m.expected_info(data, ParamPoint{p, w.lambda})).a11;
            },
            w.psi);
        d11_lambda = central_diff(
            [&](double la) {
                return inverse_info(m.expected_info(data, ParamPoint{w.psi, la})).a11;
            },
            w.lambda);
        d12_lambda = central_diff(
            [&](double la) {
                return inverse_info(m.expected_info(data, ParamPoint{w.psi, la})).a12;
            },
            w.lambda);
    }

    const double da_dpsi = d11_psi / (2.0 * c.a);
    const double db_dlambda = (d12_lambda - i12 * d11_lambda / (2.0 * i11)) / c.a;
    c.d = -(da_dpsi + db_dlambda);

    if (!std::isfinite(c.a) || !std::isfinite(c.b) || !std::isfinite(c.d)) {
        throw NonFiniteValue("characteristic coefficients are not finite");
    }
    return c;
}

CharacteristicSolution trace_characteristic(const ModelSpec& m, const Dataset& data,
                                            const InitialCondition& ic,
                                            const ParamPoint& target,
                                            const TraceOptions& opts) {
    if (!m.domain.contains(target)) {
        throw DomainViolation("target point is outside the parameter domain");
    }
    if (!m.domain.psi.contains(ic.s0)) {
        throw DomainViolation("initial curve sits outside the psi-domain");
    }

    const auto slope = [&](double psi, double lambda) {
        const ParamPoint p{psi, lambda};
        if (!m.domain.contains(p)) {
            throw PathLeftDomain("characteristic left the parameter domain");
        }
        try {
            const PdeCoefficients c = pde_coefficients(m, data, p);
            return c.b / c.a;
        } catch (const SingularInformation&) {
            throw PathLeftDomain(
                "information became singular along the characteristic");
        } catch (const DomainViolation&) {
            throw PathLeftDomain("characteristic left the parameter domain");
        }
    };

    CharacteristicSolution sol;

    // Target on the initial curve: the log prior is initial data.
    if (std::abs(target.psi - ic.s0) < degenerate_span) {
        sol.xi_star =
            ic.lambda_is_identity ? target.lambda : solve_xi(ic.Lambda, target.lambda);
        check_initial_curve(m, data, ic, sol.xi_star, target.lambda);
        sol.lambda_path = integrate_ode([](double, double) { return 0.0; },
                                        target.psi, target.lambda, target.psi);
        sol.z_initial = ic.Z(sol.xi_star);
        sol.z_value = sol.z_initial;
        return sol;
    }

    double lambda_at_curve = 0.0;
    if (opts.convention == TraceConvention::backward) {
        sol.lambda_path = integrate_ode(slope, target.psi, target.lambda, ic.s0,
                                        opts.rtol, opts.atol);
        lambda_at_curve = sol.lambda_path.back_state();
        sol.xi_star =
            ic.lambda_is_identity ? lambda_at_curve : solve_xi(ic.Lambda, lambda_at_curve);
    } else {
        sol.xi_star =
            ic.lambda_is_identity ? target.lambda : solve_xi(ic.Lambda, target.lambda);
        lambda_at_curve = target.lambda;
        sol.lambda_path = integrate_ode(slope, ic.s0, lambda_at_curve, target.psi,
                                        opts.rtol, opts.atol);
    }

    check_initial_curve(m, data, ic, sol.xi_star, lambda_at_curve);

    const auto integrand = [&](double psi) {
        const double lambda = sol.lambda_path(psi);
        const ParamPoint p{psi, lambda};
        if (!m.domain.contains(p)) {
            throw PathLeftDomain("characteristic left the parameter domain");
        }
        const PdeCoefficients c = pde_coefficients(m, data, p);
        return c.d / c.a;
    };
    sol.quadrature_panels = opts.n_panels;
    sol.path_integral = simpson(integrand, ic.s0, target.psi, opts.n_panels);
    sol.z_initial = ic.Z(sol.xi_star);
    sol.z_value = sol.z_initial + sol.path_integral;
    if (!std::isfinite(sol.z_value)) {
        throw NonFiniteValue("log prior evaluated to a non-finite value");
    }
    return sol;
}

double log_prior_ratio(const ModelSpec& m, const Dataset& data,
                       const InitialCondition& ic, const ParamPoint& w_hat,
                       const ParamPoint& w0, const TraceOptions& opts) {
    InitialCondition anchored = ic;
    anchored.s0 = w0.psi;
    const CharacteristicSolution at_hat =
        trace_characteristic(m, data, anchored, w_hat, opts);
    const CharacteristicSolution at_null =
        trace_characteristic(m, data, anchored, w0, opts);
    // Difference the initial data before adding the path integrals: a
    // constant shift of Z then cancels exactly rather than to rounding.
    return (at_hat.z_initial - at_null.z_initial) +
           (at_hat.path_integral - at_null.path_integral);
}

double pde_residual(const ModelSpec& m, const Dataset& data,
                    const std::function<double(const ParamPoint&)>& log_prior,
                    const ParamPoint& w) {
    const PdeCoefficients c = pde_coefficients(m, data, w);
    const double h_psi = 1e-4 * std::max(1.0, std::abs(w.psi));
    const double h_lambda = 1e-4 * std::max(1.0, std::abs(w.lambda));
    const double z_psi = central_diff(
        [&](double p) { return log_prior(ParamPoint{p, w.lambda}); }, w.psi, h_psi);
    const double z_lambda = central_diff(
        [&](double la) { return log_prior(ParamPoint{w.psi, la}); }, w.lambda,
        h_lambda);
    return c.a * z_psi + c.b * z_lambda - c.d;
}

std::function<double(double)> z_family(double q, double center) {
    if (!std::isfinite(q) || !std::isfinite(center)) {
        throw InputError("z_family needs finite q and center");
    }
    return [q, center](double xi) {
        const double t = std::abs(xi - center);
        const double p = std::pow(t, q);
        const double z = -std::log(p + 1.0);
        if (!std::isfinite(z)) {
            throw NonRealPower("|xi - center|^q is not finite at the requested xi");
        }
        return z;
    };
}

InitialCondition make_initial_condition(const std::string& name, double s0) {
    InitialCondition ic;
    ic.s0 = s0;
    ic.name = name;
    ic.Psi = [s0](double) { return s0; };
    ic.Lambda = [](double xi) { return xi; };
    ic.lambda_is_identity = true;

    if (name == "default") {
        ic.Z = [](double) { return -1.0; };
        return ic;
    }
    if (name == "loglambda") {
        ic.Z = [](double xi) {
            if (!(xi > 0.0)) {
                throw NonRealPower("-log(xi) requires a positive xi");
            }
            return -std::log(xi);
        };
        return ic;
    }
    if (name.rfind("qfam:", 0) == 0) {
        const double q = parse_ratio(name.substr(5));
        ic.Z = z_family(q);
        return ic;
    }
    throw InputError("unknown initial-condition preset: " + name);
}

double parse_ratio(const std::string& text) {
    if (text.empty()) throw InputError("empty number");
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const std::string num_s = text.substr(0, slash);
            const std::string den_s = text.substr(slash + 1);
            const long long num = std::stoll(num_s, &used);
            if (used != num_s.size()) throw InputError("trailing text in numerator");
            const long long den = std::stoll(den_s, &used);
            if (used != den_s.size()) throw InputError("trailing text in denominator");
            if (den == 0) throw InputError("zero denominator");
            return static_cast<double>(num) / static_cast<double>(den);
        }
        const double v = std::stod(text, &used);
        if (used != text.size()) throw InputError("trailing text in number");
        return v;
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        throw InputError("could not parse number: " + text);
    }
}

}  // namespace matchprior
