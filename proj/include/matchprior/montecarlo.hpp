#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matchprior/approx.hpp"
#include "matchprior/rng.hpp"

namespace matchprior {

// One simulation study. psi0 equals true_params.psi for type-I-error
// runs. Methods are preset ids: "lrt", "ic-default", "ic-loglambda",
// "qfam:<q>", "analytic-invpsi", "analytic-invpsilambda".
struct SimConfig {
    std::string model_id = "exp-ratio";  // "exp-ratio" | "logistic"
    std::size_t n = 10;
    std::size_t reps = 1000;
    ParamPoint true_params{1.0, 1.0};
    double psi0 = 1.0;
    double alpha = 0.05;
    std::vector<std::string> methods{"lrt", "ic-default"};
    std::uint64_t master_seed = 42;
    TraceOptions trace{};
    int threads = 0;  // 0 = runtime default
};

// Rejection counts per method, for both tail formats and both
// sidednesses. Rates are counts over valid replicates. All fields are
// integers so accumulation order cannot change the result.
struct MethodReport {
    std::string id;
    std::uint64_t rej_bn_one = 0;
    std::uint64_t rej_bn_two = 0;
    std::uint64_t rej_lr_one = 0;
    std::uint64_t rej_lr_two = 0;
    std::uint64_t near_singular_count = 0;
    std::uint64_t lr_clamped_count = 0;
    std::uint64_t degenerate_count = 0;
    std::uint64_t valid = 0;

    double rate_bn_one() const { return valid ? double(rej_bn_one) / double(valid) : 0.0; }
    double rate_bn_two() const { return valid ? double(rej_bn_two) / double(valid) : 0.0; }
    double rate_lr_one() const { return valid ? double(rej_lr_one) / double(valid) : 0.0; }
    double rate_lr_two() const { return valid ? double(rej_lr_two) / double(valid) : 0.0; }

    friend bool operator==(const MethodReport&, const MethodReport&) = default;
};

// wall_seconds is diagnostic only: it is excluded from equality and from
// serialized tables so reruns stay bit-identical.
struct SimReport {
    std::uint64_t reps = 0;
    std::vector<MethodReport> methods;
    double wall_seconds = 0.0;

    friend bool operator==(const SimReport& a, const SimReport& b) {
        return a.reps == b.reps && a.methods == b.methods;
    }
};

struct CoverageMethodReport {
    std::string id;
    std::uint64_t covered = 0;
    std::uint64_t valid = 0;
    std::uint64_t degenerate_count = 0;

    friend bool operator==(const CoverageMethodReport&,
                           const CoverageMethodReport&) = default;
};

struct CoverageReport {
    std::uint64_t reps = 0;
    double level = 0.0;
    std::vector<CoverageMethodReport> methods;
    double wall_seconds = 0.0;

    friend bool operator==(const CoverageReport& a, const CoverageReport& b) {
        return a.reps == b.reps && a.level == b.level && a.methods == b.methods;
    }
};

// Resolved method: the LRT baseline uses T = R; everything else carries
// a prior for the T statistic.
struct Method {
    std::string id;
    bool is_lrt = false;
    PriorChoice prior;
};

Method parse_method(const std::string& id, const TraceOptions& trace);

// Draw one replicate dataset. The exponential-ratio model samples paired
// responses; the logistic model draws fresh U(0,1) covariates each
// replicate and then Bernoulli responses at the true parameters.
Dataset simulate_replicate(const ModelSpec& model, const SimConfig& cfg, Rng& rng);

ModelSpec make_model(const SimConfig& cfg);

// Type-I-error study at cfg.psi0: every method is evaluated on the same
// replicate data; rejection happens when the p-value falls below
// cfg.alpha. Replicate i draws from replicate_seed(master_seed, i), so
// the report is independent of thread count and scheduling. run_type1
// runs replicates in parallel; run_type1_serial is the plain-loop
// reference implementation kept for testing and benchmarking.
SimReport run_type1(const SimConfig& cfg);
SimReport run_type1_serial(const SimConfig& cfg);

// Credible-interval coverage of the true psi at the given level.
CoverageReport run_coverage(const SimConfig& cfg, double level);
CoverageReport run_coverage_serial(const SimConfig& cfg, double level);

}  // namespace matchprior
