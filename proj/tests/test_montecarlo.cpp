#include <doctest.h>

#include <cmath>
#include <set>

#include "matchprior/errors.hpp"
#include "matchprior/montecarlo.hpp"
#include "matchprior/rng.hpp"

using namespace matchprior;

namespace {

SimConfig small_exp_config() {
    SimConfig cfg;
    cfg.model_id = "exp-ratio";
    cfg.n = 10;
    cfg.reps = 300;
    cfg.true_params = {1.0, 1.0};
    cfg.psi0 = 1.0;
    cfg.methods = {"lrt", "ic-default"};
    cfg.master_seed = 42;
    return cfg;
}

SimConfig small_logistic_config() {
    SimConfig cfg;
    cfg.model_id = "logistic";
    cfg.n = 30;
    cfg.reps = 120;
    cfg.true_params = {0.5, -1.0};
    cfg.psi0 = 0.5;
    cfg.methods = {"lrt", "qfam:2/5"};
    cfg.master_seed = 7;
    cfg.trace.convention = TraceConvention::forward;
    return cfg;
}

}  // namespace

TEST_CASE("replicate seeds are distinct and reproducible") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        seen.insert(replicate_seed(42, i));
    }
    CHECK(seen.size() == 10000);
    CHECK(replicate_seed(42, 3) == replicate_seed(42, 3));
    CHECK(replicate_seed(42, 3) != replicate_seed(43, 3));
}

TEST_CASE("same seed gives a bit-identical report") {
    const auto cfg = small_exp_config();
    const auto a = run_type1(cfg);
    const auto b = run_type1(cfg);
    CHECK(a == b);
    auto reseeded = cfg;
    reseeded.master_seed = 43;
    CHECK_FALSE(run_type1(reseeded) == a);
}

TEST_CASE("report does not depend on the thread count") {
    auto cfg = small_exp_config();
    cfg.threads = 1;
    const auto one = run_type1(cfg);
    cfg.threads = 2;
    const auto two = run_type1(cfg);
    cfg.threads = 4;
    const auto four = run_type1(cfg);
    CHECK(one == two);
    CHECK(one == four);
}

TEST_CASE("parallel and serial runners agree exactly") {
    SUBCASE("exponential ratio") {
        const auto cfg = small_exp_config();
        CHECK(run_type1(cfg) == run_type1_serial(cfg));
    }
    SUBCASE("logistic with a matching prior") {
        const auto cfg = small_logistic_config();
        CHECK(run_type1(cfg) == run_type1_serial(cfg));
    }
}

TEST_CASE("alpha = 1 rejects every valid replicate") {
    auto cfg = small_exp_config();
    cfg.reps = 100;
    cfg.alpha = 1.0;
    const auto report = run_type1(cfg);
    for (const auto& m : report.methods) {
        CHECK(m.valid + m.degenerate_count == cfg.reps);
        // p <= 1 always, and rejection uses p <= alpha, so every valid
        // replicate rejects under both formats and sidednesses.
        CHECK(m.rej_bn_one == m.valid);
        CHECK(m.rej_bn_two == m.valid);
        CHECK(m.rej_lr_one == m.valid);
        CHECK(m.rej_lr_two == m.valid);
    }
}

TEST_CASE("rates stay near the nominal level on a small run") {
    auto cfg = small_exp_config();
    cfg.reps = 2000;
    cfg.methods = {"lrt"};
    const auto report = run_type1(cfg);
    const auto& m = report.methods.front();
    // 3.5 binomial standard errors around 0.05 for reps = 2000.
    CHECK(m.rate_bn_two() > 0.05 - 0.017);
    CHECK(m.rate_bn_two() < 0.05 + 0.017);
}

TEST_CASE("every method sees the same replicate data") {
    // The analytic 1/psi prior and the numerically solved default initial
    // condition define the same method, so their counts must coincide on
    // every replicate stream.
    auto cfg = small_exp_config();
    cfg.reps = 200;
    cfg.methods = {"ic-default", "analytic-invpsi"};
    const auto report = run_type1(cfg);
    REQUIRE(report.methods.size() == 2);
    const auto& a = report.methods[0];
    const auto& b = report.methods[1];
    CHECK(a.rej_bn_one == b.rej_bn_one);
    CHECK(a.rej_bn_two == b.rej_bn_two);
    CHECK(a.rej_lr_one == b.rej_lr_one);
    CHECK(a.rej_lr_two == b.rej_lr_two);
    CHECK(a.valid == b.valid);
}

TEST_CASE("logistic replicates draw all covariates before any response") {
    SimConfig cfg = small_logistic_config();
    cfg.n = 5;
    Rng rng(11);
    const Dataset data = simulate_replicate(make_model(cfg), cfg, rng);
    REQUIRE(data.size() == 5);

    Rng replay(11);
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(data.x[j] == replay.uniform01());
    }
    for (std::size_t j = 0; j < 5; ++j) {
        const double eta = cfg.true_params.lambda + cfg.true_params.psi * data.x[j];
        const double p = 1.0 / (1.0 + std::exp(-eta));
        CHECK(data.y[j] == (replay.bernoulli(p) ? 1.0 : 0.0));
        CHECK((data.y[j] == 0.0 || data.y[j] == 1.0));
    }
}

TEST_CASE("exponential replicates delegate to the model sampler") {
    SimConfig cfg = small_exp_config();
    cfg.n = 8;
    const auto model = make_model(cfg);
    Rng a(99);
    Rng b(99);
    const Dataset via_replicate = simulate_replicate(model, cfg, a);
    const Dataset direct = model.simulate(cfg.true_params, cfg.n, b);
    CHECK(via_replicate.x == direct.x);
    CHECK(via_replicate.y == direct.y);
}

TEST_CASE("coverage study counts intervals containing the true value") {
    auto cfg = small_logistic_config();
    cfg.reps = 60;
    cfg.methods = {"qfam:2/5"};
    const auto report = run_coverage(cfg, 0.95);
    CHECK(report.reps == 60);
    CHECK(report.level == 0.95);
    REQUIRE(report.methods.size() == 1);
    const auto& m = report.methods.front();
    CHECK(m.valid + m.degenerate_count == 60);
    CHECK(m.covered <= m.valid);
    // At 95% nominal coverage, fewer than half covering would mean the
    // interval construction is broken outright.
    CHECK(m.covered > m.valid / 2);
    CHECK(run_coverage(cfg, 0.95) == report);
    CHECK(run_coverage_serial(cfg, 0.95) == report);
}

TEST_CASE("configuration validation") {
    auto cfg = small_exp_config();
    cfg.model_id = "weibull";
    CHECK_THROWS_AS(run_type1(cfg), InputError);

    cfg = small_exp_config();
    cfg.reps = 0;
    CHECK_THROWS_AS(run_type1(cfg), InputError);

    cfg = small_exp_config();
    cfg.n = 1;
    CHECK_THROWS_AS(run_type1(cfg), InputError);

    cfg = small_exp_config();
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(run_type1(cfg), InputError);

    cfg = small_exp_config();
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(run_type1(cfg), InputError);

    cfg = small_exp_config();
    cfg.methods = {};
    CHECK_THROWS_AS(run_type1(cfg), InputError);

    cfg = small_exp_config();
    cfg.methods = {"not-a-method"};
    CHECK_THROWS_AS(run_type1(cfg), InputError);
}

TEST_CASE("coverage rejects the lrt baseline and bad levels") {
    auto cfg = small_exp_config();
    cfg.methods = {"lrt"};
    CHECK_THROWS_AS(run_coverage(cfg, 0.95), InputError);

    cfg.methods = {"ic-default"};
    CHECK_THROWS_AS(run_coverage(cfg, 0.0), InputError);
    CHECK_THROWS_AS(run_coverage(cfg, 1.0), InputError);
}

TEST_CASE("method presets accept both spellings of the named conditions") {
    TraceOptions trace;
    CHECK(parse_method("ic-default", trace).id == "ic-default");
    CHECK_FALSE(parse_method("default", trace).is_lrt);
    CHECK_FALSE(parse_method("loglambda", trace).is_lrt);
    CHECK(parse_method("lrt", trace).is_lrt);
    CHECK_FALSE(parse_method("qfam:2", trace).is_lrt);
    CHECK_THROWS_AS(parse_method("qfam:", trace), InputError);
    CHECK_THROWS_AS(parse_method("mystery", trace), InputError);
}
