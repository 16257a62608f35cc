#include "matchprior/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace matchprior {

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw DegenerateFit("empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_positive_params(const ParamPoint& w) {
    if (!(w.psi > 0.0) || !(w.lambda > 0.0)) {
        throw DomainViolation("psi and lambda must be positive");
    }
}

void require_finite_params(const ParamPoint& w) {
    if (!std::isfinite(w.psi) || !std::isfinite(w.lambda)) {
        throw NonFiniteValue("parameter point is not finite");
    }
}

// P(Y=1) for linear predictor eta, stable for large |eta|.
double logistic_prob(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
double log1p_exp(double eta) {
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

}  // namespace

Mat2 inverse_info(const Mat2& m) {
    const double det = m.det();
    const double scale = std::abs(m.a11 * m.a22) + m.a12 * m.a12;
    if (!std::isfinite(det) || !(det > scale * 1e-14) || !(det > 0.0)) {
        throw SingularInformation("information matrix is singular or indefinite");
    }
    Mat2 inv;
    inv.a11 = m.a22 / det;
    inv.a12 = -m.a12 / det;
    inv.a22 = m.a11 / det;
    return inv;
}

ModelSpec exp_ratio_model() {
    ModelSpec m;
    m.name = "exp_ratio";
    m.domain.psi = Interval{0.0, std::numeric_limits<double>::infinity()};
    m.domain.lambda = Interval{0.0, std::numeric_limits<double>::infinity()};

    m.loglik = [](const Dataset& data, const ParamPoint& w) {
        require_positive_params(w);
        const double n = static_cast<double>(data.size());
        const double xb = mean_of(data.x);
        const double yb = mean_of(data.y);
        const double rt = std::sqrt(w.psi);
        return -n * ((w.psi * xb + yb) / (w.lambda * rt) + 2.0 * std::log(w.lambda));
    };

    m.score = [](const Dataset& data, const ParamPoint& w) {
        require_positive_params(w);
        const double n = static_cast<double>(data.size());
        const double xb = mean_of(data.x);
        const double yb = mean_of(data.y);
        const double rt = std::sqrt(w.psi);
        Vec2 s;
        s.v1 = -(n / (2.0 * w.lambda)) * (xb / rt - yb / (w.psi * rt));
        s.v2 = n * (w.psi * xb + yb) / (w.lambda * w.lambda * rt) - 2.0 * n / w.lambda;
        return s;
    };

    m.hessian = [](const Dataset& data, const ParamPoint& w) {
        require_positive_params(w);
        const double n = static_cast<double>(data.size());
        const double xb = mean_of(data.x);
        const double yb = mean_of(data.y);
        const double p = w.psi;
        const double la = w.lambda;
        const double rt = std::sqrt(p);
        Mat2 h;
        h.a11 = (n / (4.0 * la)) * (xb / (p * rt) - 3.0 * yb / (p * p * rt));
        h.a12 = (n / (2.0 * la * la)) * (xb / rt - yb / (p * rt));
        h.a22 = -2.0 * n * (p * xb + yb) / (la * la * la * rt) + 2.0 * n / (la * la);
        return h;
    };

    m.expected_info = [](const Dataset& data, const ParamPoint& w) {
        require_positive_params(w);
        const double n = static_cast<double>(data.size());
        Mat2 i;
        i.a11 = n / (2.0 * w.psi * w.psi);
        i.a12 = 0.0;
        i.a22 = 2.0 * n / (w.lambda * w.lambda);
        return i;
    };

    m.expected_info_dpsi = [](const Dataset& data, const ParamPoint& w) {
        require_positive_params(w);
        const double n = static_cast<double>(data.size());
        Mat2 d;
        d.a11 = -n / (w.psi * w.psi * w.psi);
        return d;
    };

    m.expected_info_dlambda = [](const Dataset& data, const ParamPoint& w) {
        require_positive_params(w);
        const double n = static_cast<double>(data.size());
        Mat2 d;
        d.a22 = -4.0 * n / (w.lambda * w.lambda * w.lambda);
        return d;
    };

    m.closed_form_mle = [](const Dataset& data) {
        const double xb = mean_of(data.x);
        const double yb = mean_of(data.y);
        if (!(xb > 0.0) || !(yb > 0.0)) throw DegenerateFit("nonpositive sample mean");
        return ParamPoint{yb / xb, std::sqrt(xb * yb)};
    };

    m.closed_form_constrained = [](const Dataset& data, double psi0) {
        const double xb = mean_of(data.x);
        const double yb = mean_of(data.y);
        if (!(psi0 > 0.0)) throw DomainViolation("psi must be positive");
        return (psi0 * xb + yb) / (2.0 * std::sqrt(psi0));
    };

    m.initial_guess = [](const Dataset& data) {
        const double xb = mean_of(data.x);
        const double yb = mean_of(data.y);
        return ParamPoint{yb / xb, std::sqrt(xb * yb)};
    };

    // Draws are paired (x_i, y_i) in observation order; reordering would
    // change the stream a fixed seed produces.
    m.simulate = [](const ParamPoint& w, std::size_t n, Rng& rng) {
        Dataset data;
        data.x.reserve(n);
        data.y.reserve(n);
        const double rt = std::sqrt(w.psi);
        for (std::size_t i = 0; i < n; ++i) {
            data.x.push_back(rng.exponential(w.lambda / rt));
            data.y.push_back(rng.exponential(w.lambda * rt));
        }
        return data;
    };

    return m;
}

ModelSpec logistic_model(std::vector<double> covariates) {
    if (covariates.empty()) throw DomainViolation("logistic model needs covariate values");

    ModelSpec m;
    m.name = "logistic";
    m.estimate_bound = 30.0;

    m.loglik = [](const Dataset& data, const ParamPoint& w) {
        require_finite_params(w);
        double l = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double eta = w.lambda + w.psi * data.x[j];
            l += data.y[j] * eta - log1p_exp(eta);
        }
        return l;
    };

    m.score = [](const Dataset& data, const ParamPoint& w) {
        require_finite_params(w);
        Vec2 s;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double r = data.y[j] - logistic_prob(w.lambda + w.psi * data.x[j]);
            s.v1 += data.x[j] * r;
            s.v2 += r;
        }
        return s;
    };

    m.hessian = [](const Dataset& data, const ParamPoint& w) {
        require_finite_params(w);
        Mat2 h;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double p = logistic_prob(w.lambda + w.psi * data.x[j]);
            const double wj = p * (1.0 - p);
            h.a11 -= wj * data.x[j] * data.x[j];
            h.a12 -= wj * data.x[j];
            h.a22 -= wj;
        }
        return h;
    };

    // Canonical link: the information does not depend on y, so expected
    // and observed information coincide.
    m.expected_info = [](const Dataset& data, const ParamPoint& w) {
        require_finite_params(w);
        Mat2 i;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double p = logistic_prob(w.lambda + w.psi * data.x[j]);
            const double wj = p * (1.0 - p);
            i.a11 += wj * data.x[j] * data.x[j];
            i.a12 += wj * data.x[j];
            i.a22 += wj;
        }
        return i;
    };

    // dw/deta = w(1-2p); the psi derivative carries an extra x_j.
    m.expected_info_dpsi = [](const Dataset& data, const ParamPoint& w) {
        Mat2 d;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double p = logistic_prob(w.lambda + w.psi * data.x[j]);
            const double g = data.x[j] * p * (1.0 - p) * (1.0 - 2.0 * p);
            d.a11 += g * data.x[j] * data.x[j];
            d.a12 += g * data.x[j];
            d.a22 += g;
        }
        return d;
    };

    m.expected_info_dlambda = [](const Dataset& data, const ParamPoint& w) {
        Mat2 d;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double p = logistic_prob(w.lambda + w.psi * data.x[j]);
            const double g = p * (1.0 - p) * (1.0 - 2.0 * p);
            d.a11 += g * data.x[j] * data.x[j];
            d.a12 += g * data.x[j];
            d.a22 += g;
        }
        return d;
    };

    // Start at zero slope with the intercept-only fit, clamped so a
    // degenerate response vector still yields a finite starting point.
    m.initial_guess = [](const Dataset& data) {
        const double yb = mean_of(data.y);
        double logit = 0.0;
        if (yb <= 0.0) {
            logit = -5.0;
        } else if (yb >= 1.0) {
            logit = 5.0;
        } else {
            logit = std::clamp(std::log(yb / (1.0 - yb)), -5.0, 5.0);
        }
        return ParamPoint{0.0, logit};
    };

    m.simulate = [design = std::move(covariates)](const ParamPoint& w, std::size_t n,
                                                  Rng& rng) {
        Dataset data;
        data.x.reserve(n);
        data.y.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double xj = design[j % design.size()];
            const double p = logistic_prob(w.lambda + w.psi * xj);
            data.x.push_back(xj);
            data.y.push_back(rng.bernoulli(p) ? 1.0 : 0.0);
        }
        return data;
    };

    return m;
}

}  // namespace matchprior
