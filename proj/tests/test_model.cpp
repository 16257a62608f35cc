#include <doctest.h>

#include <cmath>
#include <vector>

#include "matchprior/model.hpp"
#include "matchprior/numerics.hpp"
#include "matchprior/rng.hpp"

using namespace matchprior;

namespace {

Dataset tiny_exp_data() {
    Dataset d;
    d.x = {1.0};
    d.y = {2.0};
    return d;
}

Dataset exp_data5() {
    Dataset d;
    d.x = {1.2, 0.8, 1.0, 1.5, 0.9};
    d.y = {2.1, 1.7, 2.4, 1.9, 2.2};
    return d;
}

Dataset logistic_data4() {
    Dataset d;
    d.x = {0.1, 0.4, 0.6, 0.9};
    d.y = {0.0, 1.0, 0.0, 1.0};
    return d;
}

}  // namespace

TEST_CASE("inverse_info inverts 2x2 symmetric matrices") {
    const Mat2 inv = inverse_info(Mat2{2.0, 1.0, 1.0});
    CHECK(inv.a11 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inv.a12 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(inv.a22 == doctest::Approx(2.0).epsilon(1e-14));

    const Mat2 diag = inverse_info(Mat2{5.0, 0.0, 20.0});
    CHECK(diag.a11 == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(diag.a12 == 0.0);
    CHECK(diag.a22 == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("inverse_info rejects singular and indefinite matrices") {
    CHECK_THROWS_AS(inverse_info(Mat2{1.0, 1.0, 1.0}), SingularInformation);
    CHECK_THROWS_AS(inverse_info(Mat2{1.0, 2.0, 1.0}), SingularInformation);
}

TEST_CASE("exp-ratio log-likelihood matches the closed form") {
    const ModelSpec m = exp_ratio_model();
    const double l = m.loglik(tiny_exp_data(), ParamPoint{2.0, 1.0});
    CHECK(l == doctest::Approx(-2.8284271247461901).epsilon(1e-14));
}

TEST_CASE("exp-ratio expected information is the orthogonal diagonal") {
    const ModelSpec m = exp_ratio_model();
    Dataset d;
    d.x.assign(10, 1.0);
    d.y.assign(10, 1.0);
    const Mat2 info = m.expected_info(d, ParamPoint{2.0, 1.0});
    CHECK(info.a11 == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(info.a12 == 0.0);
    CHECK(info.a22 == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("exp-ratio score matches numerical differentiation") {
    const ModelSpec m = exp_ratio_model();
    const Dataset d = exp_data5();
    Rng rng(31u);
    for (int k = 0; k < 100; ++k) {
        const ParamPoint w{0.25 + 3.0 * rng.uniform01(),
                           0.25 + 3.0 * rng.uniform01()};
        const Vec2 s = m.score(d, w);
        const double num_psi = central_diff(
            [&](double p) { return m.loglik(d, ParamPoint{p, w.lambda}); }, w.psi);
        const double num_lambda = central_diff(
            [&](double l) { return m.loglik(d, ParamPoint{w.psi, l}); }, w.lambda);
        CHECK(s.v1 == doctest::Approx(num_psi).epsilon(1e-5));
        CHECK(s.v2 == doctest::Approx(num_lambda).epsilon(1e-5));
    }
}

TEST_CASE("exp-ratio hessian matches numerical second differences") {
    const ModelSpec m = exp_ratio_model();
    const Dataset d = exp_data5();
    const ParamPoint w{1.3, 0.8};
    const Mat2 h = m.hessian(d, w);
    const double hpp = central_diff(
        [&](double p) { return m.score(d, ParamPoint{p, w.lambda}).v1; }, w.psi);
    const double hpl = central_diff(
        [&](double l) { return m.score(d, ParamPoint{w.psi, l}).v1; }, w.lambda);
    const double hll = central_diff(
        [&](double l) { return m.score(d, ParamPoint{w.psi, l}).v2; }, w.lambda);
    CHECK(h.a11 == doctest::Approx(hpp).epsilon(1e-6));
    CHECK(h.a12 == doctest::Approx(hpl).epsilon(1e-6));
    CHECK(h.a22 == doctest::Approx(hll).epsilon(1e-6));
}

TEST_CASE("exp-ratio expected information matches Monte Carlo curvature") {
    const ModelSpec m = exp_ratio_model();
    const ParamPoint truth{1.5, 1.2};
    const std::size_t n = 40;
    Rng rng(2024u);
    Mat2 avg{0.0, 0.0, 0.0};
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
        const Dataset d = m.simulate(truth, n, rng);
        const Mat2 h = m.hessian(d, truth);
        avg.a11 -= h.a11 / reps;
        avg.a12 -= h.a12 / reps;
        avg.a22 -= h.a22 / reps;
    }
    Dataset shape;
    shape.x.assign(n, 1.0);
    shape.y.assign(n, 1.0);
    const Mat2 info = m.expected_info(shape, truth);
    CHECK(avg.a11 == doctest::Approx(info.a11).epsilon(0.02));
    CHECK(std::abs(avg.a12) < 0.02 * info.a22);
    CHECK(avg.a22 == doctest::Approx(info.a22).epsilon(0.02));
}

TEST_CASE("exp-ratio closed-form fits satisfy the score equations") {
    const ModelSpec m = exp_ratio_model();
    const Dataset d = exp_data5();
    const ParamPoint w = m.closed_form_mle(d);
    CHECK(w.psi == doctest::Approx(2.06 / 1.08).epsilon(1e-14));
    CHECK(w.lambda == doctest::Approx(std::sqrt(1.08 * 2.06)).epsilon(1e-14));
    const Vec2 s = m.score(d, w);
    CHECK(std::abs(s.v1) < 1e-10);
    CHECK(std::abs(s.v2) < 1e-10);

    const double psi0 = 0.7;
    const double l0 = m.closed_form_constrained(d, psi0);
    CHECK(l0 == doctest::Approx((psi0 * 1.08 + 2.06) / (2.0 * std::sqrt(psi0)))
                    .epsilon(1e-14));
    CHECK(std::abs(m.score(d, ParamPoint{psi0, l0}).v2) < 1e-10);
}

TEST_CASE("exp-ratio evaluators reject out-of-domain points") {
    const ModelSpec m = exp_ratio_model();
    const Dataset d = tiny_exp_data();
    CHECK_THROWS_AS(m.loglik(d, ParamPoint{-1.0, 1.0}), DomainViolation);
    CHECK_THROWS_AS(m.score(d, ParamPoint{1.0, 0.0}), DomainViolation);
    CHECK_THROWS_AS(m.expected_info(d, ParamPoint{0.0, 1.0}), DomainViolation);
}

TEST_CASE("exp-ratio simulate is deterministic and positive") {
    const ModelSpec m = exp_ratio_model();
    Rng a(99u), b(99u);
    const Dataset d1 = m.simulate(ParamPoint{1.0, 1.0}, 20, a);
    const Dataset d2 = m.simulate(ParamPoint{1.0, 1.0}, 20, b);
    REQUIRE(d1.size() == 20);
    CHECK(d1.x == d2.x);
    CHECK(d1.y == d2.y);
    for (std::size_t i = 0; i < d1.size(); ++i) {
        CHECK(d1.x[i] > 0.0);
        CHECK(d1.y[i] > 0.0);
    }
}

TEST_CASE("logistic log-likelihood matches direct Bernoulli sums") {
    const Dataset d = logistic_data4();
    const ModelSpec m = logistic_model(d.x);
    const ParamPoint w{0.5, -1.0};  // (slope, intercept)
    double expect = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double eta = w.lambda + w.psi * d.x[i];
        const double p = 1.0 / (1.0 + std::exp(-eta));
        expect += d.y[i] * std::log(p) + (1.0 - d.y[i]) * std::log(1.0 - p);
    }
    CHECK(m.loglik(d, w) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("logistic log-likelihood is stable at extreme linear predictors") {
    const Dataset d = logistic_data4();
    const ModelSpec m = logistic_model(d.x);
    const double l = m.loglik(d, ParamPoint{800.0, -350.0});
    CHECK(std::isfinite(l));
    // y=0 observations at strongly positive eta dominate: l ~ -sum(eta_i | y=0).
    CHECK(l < -100.0);
}

TEST_CASE("logistic information at the origin with a binary design") {
    std::vector<double> design{0.0, 1.0};
    const ModelSpec m = logistic_model(design);
    Dataset d;
    d.x = design;
    d.y = {0.0, 1.0};
    const Mat2 info = m.expected_info(d, ParamPoint{0.0, 0.0});
    CHECK(info.a11 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(info.a12 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(info.a22 == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("logistic observed information equals expected information") {
    // Canonical link: second derivatives carry no y terms.
    const Dataset d = logistic_data4();
    const ModelSpec m = logistic_model(d.x);
    const ParamPoint w{0.7, -0.3};
    const Mat2 h = m.hessian(d, w);
    const Mat2 info = m.expected_info(d, w);
    CHECK(h.a11 == doctest::Approx(-info.a11).epsilon(1e-14));
    CHECK(h.a12 == doctest::Approx(-info.a12).epsilon(1e-14));
    CHECK(h.a22 == doctest::Approx(-info.a22).epsilon(1e-14));
}

TEST_CASE("logistic score matches numerical differentiation") {
    const Dataset d = logistic_data4();
    const ModelSpec m = logistic_model(d.x);
    Rng rng(7u);
    for (int k = 0; k < 100; ++k) {
        const ParamPoint w{-3.0 + 6.0 * rng.uniform01(),
                           -3.0 + 6.0 * rng.uniform01()};
        const Vec2 s = m.score(d, w);
        const double num_psi = central_diff(
            [&](double p) { return m.loglik(d, ParamPoint{p, w.lambda}); }, w.psi);
        const double num_lambda = central_diff(
            [&](double l) { return m.loglik(d, ParamPoint{w.psi, l}); }, w.lambda);
        CHECK(s.v1 == doctest::Approx(num_psi).epsilon(1e-5));
        CHECK(s.v2 == doctest::Approx(num_lambda).epsilon(1e-5));
    }
}

TEST_CASE("logistic information derivatives match finite differences") {
    const Dataset d = logistic_data4();
    const ModelSpec m = logistic_model(d.x);
    const ParamPoint w{0.4, -0.8};
    REQUIRE(m.expected_info_dpsi);
    REQUIRE(m.expected_info_dlambda);
    const Mat2 dp = m.expected_info_dpsi(d, w);
    const Mat2 dl = m.expected_info_dlambda(d, w);
    auto entry = [&](const ParamPoint& p, int which) {
        const Mat2 i = m.expected_info(d, p);
        return which == 0 ? i.a11 : which == 1 ? i.a12 : i.a22;
    };
    for (int which = 0; which < 3; ++which) {
        const double fd_p = central_diff(
            [&](double p) { return entry(ParamPoint{p, w.lambda}, which); }, w.psi);
        const double fd_l = central_diff(
            [&](double l) { return entry(ParamPoint{w.psi, l}, which); }, w.lambda);
        const double got_p = which == 0 ? dp.a11 : which == 1 ? dp.a12 : dp.a22;
        const double got_l = which == 0 ? dl.a11 : which == 1 ? dl.a12 : dl.a22;
        CHECK(got_p == doctest::Approx(fd_p).epsilon(1e-6));
        CHECK(got_l == doctest::Approx(fd_l).epsilon(1e-6));
    }
}

TEST_CASE("exp-ratio information derivatives match finite differences") {
    const ModelSpec m = exp_ratio_model();
    Dataset d;
    d.x.assign(10, 1.0);
    d.y.assign(10, 1.0);
    const ParamPoint w{1.7, 0.9};
    const Mat2 dp = m.expected_info_dpsi(d, w);
    const Mat2 dl = m.expected_info_dlambda(d, w);
    const double fd_11 = central_diff(
        [&](double p) { return m.expected_info(d, ParamPoint{p, w.lambda}).a11; },
        w.psi);
    const double fd_22 = central_diff(
        [&](double l) { return m.expected_info(d, ParamPoint{w.psi, l}).a22; },
        w.lambda);
    CHECK(dp.a11 == doctest::Approx(fd_11).epsilon(1e-7));
    CHECK(dp.a12 == 0.0);
    CHECK(dp.a22 == 0.0);
    CHECK(dl.a11 == 0.0);
    CHECK(dl.a22 == doctest::Approx(fd_22).epsilon(1e-7));
}

TEST_CASE("logistic initial guess uses the marginal response rate") {
    const Dataset d = logistic_data4();
    const ModelSpec m = logistic_model(d.x);
    const ParamPoint w0 = m.initial_guess(d);
    CHECK(w0.psi == 0.0);
    CHECK(w0.lambda == doctest::Approx(0.0).epsilon(1e-14));  // logit(0.5)

    Dataset all_ones = d;
    all_ones.y = {1.0, 1.0, 1.0, 1.0};
    const ParamPoint w1 = m.initial_guess(all_ones);
    CHECK(w1.lambda == doctest::Approx(5.0));  // clamped logit
}

TEST_CASE("model domains classify points") {
    const ModelSpec exp_m = exp_ratio_model();
    CHECK(exp_m.domain.contains(ParamPoint{0.5, 2.0}));
    CHECK_FALSE(exp_m.domain.contains(ParamPoint{-0.5, 2.0}));
    const ModelSpec log_m = logistic_model({0.0, 1.0});
    CHECK(log_m.domain.contains(ParamPoint{-40.0, 55.0}));
}
