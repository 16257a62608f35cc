#include "matchprior/montecarlo.hpp"

#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matchprior {

namespace {

void validate(const SimConfig& cfg) {
    if (cfg.model_id != "exp-ratio" && cfg.model_id != "logistic") {
        throw InputError("unknown model: " + cfg.model_id);
    }
    if (cfg.reps < 1) throw InputError("reps must be at least 1");
    if (cfg.n < 2) throw InputError("n must be at least 2");
    if (!(cfg.alpha > 0.0) || !(cfg.alpha <= 1.0)) {
        throw InputError("alpha must be in (0,1]");
    }
    if (cfg.methods.empty()) throw InputError("at least one method is required");
}

std::vector<Method> resolve_methods(const SimConfig& cfg) {
    std::vector<Method> out;
    out.reserve(cfg.methods.size());
    for (const auto& id : cfg.methods) out.push_back(parse_method(id, cfg.trace));
    return out;
}

void merge_into(std::vector<MethodReport>& totals,
                const std::vector<MethodReport>& local) {
    for (std::size_t j = 0; j < totals.size(); ++j) {
        totals[j].rej_bn_one += local[j].rej_bn_one;
        totals[j].rej_bn_two += local[j].rej_bn_two;
        totals[j].rej_lr_one += local[j].rej_lr_one;
        totals[j].rej_lr_two += local[j].rej_lr_two;
        totals[j].near_singular_count += local[j].near_singular_count;
        totals[j].lr_clamped_count += local[j].lr_clamped_count;
        totals[j].degenerate_count += local[j].degenerate_count;
        totals[j].valid += local[j].valid;
    }
}

std::vector<MethodReport> blank_reports(const std::vector<Method>& methods) {
    std::vector<MethodReport> out(methods.size());
    for (std::size_t j = 0; j < methods.size(); ++j) out[j].id = methods[j].id;
    return out;
}

// One replicate of the type-I study. All failures are absorbed into the
// degenerate counters: nothing may escape into the parallel region.
void type1_replicate(const ModelSpec& model, const SimConfig& cfg,
                     const std::vector<Method>& methods, std::uint64_t i,
                     std::vector<MethodReport>& acc) {
    try {
        Rng rng(replicate_seed(cfg.master_seed, i));
        const Dataset data = simulate_replicate(model, cfg, rng);

        FitResult full;
        FitResult constrained;
        try {
            full = mle(model, data);
            constrained = constrained_mle(model, data, cfg.psi0);
        } catch (const NumericError&) {
            for (auto& a : acc) a.degenerate_count += 1;
            return;
        }
        if (!full.converged || !constrained.converged) {
            for (auto& a : acc) a.degenerate_count += 1;
            return;
        }

        double R = 0.0;
        double shared = 0.0;  // prior-free factor of T
        try {
            R = signed_root(full, constrained, cfg.psi0);
            const double score_psi = model.score(data, constrained.point).v1;
            const auto [c_nuisance, c_full] =
                t_determinants(model, data, full.point, constrained.point);
            shared = score_psi * std::sqrt(c_nuisance / c_full);
        } catch (const NumericError&) {
            for (auto& a : acc) a.degenerate_count += 1;
            return;
        }

        for (std::size_t j = 0; j < methods.size(); ++j) {
            TailResult tr;
            try {
                if (methods[j].is_lrt) {
                    tr = evaluate_tails(R, R);
                } else {
                    const double dz = prior_log_ratio(model, data, methods[j].prior,
                                                      full.point, constrained.point);
                    tr = evaluate_tails(R, shared * std::exp(dz));
                }
            } catch (const NumericError&) {
                acc[j].degenerate_count += 1;
                continue;
            }
            const PValues bn = p_values(tr, Format::bn);
            const PValues lr = p_values(tr, Format::lr);
            // <= keeps the degenerate level alpha = 1 rejecting capped
            // p-values; for continuous p the boundary has no mass.
            acc[j].valid += 1;
            acc[j].rej_bn_one += bn.one_sided <= cfg.alpha ? 1 : 0;
            acc[j].rej_bn_two += bn.two_sided <= cfg.alpha ? 1 : 0;
            acc[j].rej_lr_one += lr.one_sided <= cfg.alpha ? 1 : 0;
            acc[j].rej_lr_two += lr.two_sided <= cfg.alpha ? 1 : 0;
            acc[j].near_singular_count += tr.near_singular ? 1 : 0;
            acc[j].lr_clamped_count += tr.lr_clamped ? 1 : 0;
        }
    } catch (const std::exception&) {
        for (auto& a : acc) a.degenerate_count += 1;
    }
}

void coverage_replicate(const ModelSpec& model, const SimConfig& cfg, double level,
                        const std::vector<Method>& methods, std::uint64_t i,
                        std::vector<CoverageMethodReport>& acc) {
    try {
        Rng rng(replicate_seed(cfg.master_seed, i));
        const Dataset data = simulate_replicate(model, cfg, rng);
        for (std::size_t j = 0; j < methods.size(); ++j) {
            try {
                const CredibleInterval ci =
                    credible_interval(model, data, methods[j].prior, level, Format::bn);
                acc[j].valid += 1;
                if (ci.lo <= cfg.true_params.psi && cfg.true_params.psi <= ci.hi) {
                    acc[j].covered += 1;
                }
            } catch (const NumericError&) {
                acc[j].degenerate_count += 1;
            }
        }
    } catch (const std::exception&) {
        for (auto& a : acc) a.degenerate_count += 1;
    }
}

}  // namespace

Method parse_method(const std::string& id, const TraceOptions& trace) {
    Method m;
    m.id = id;
    if (id == "lrt") {
        m.is_lrt = true;
        return m;
    }
    if (id == "ic-default" || id == "default") {
        m.prior = numeric_prior(make_initial_condition("default", 0.0), trace);
        return m;
    }
    if (id == "ic-loglambda" || id == "loglambda") {
        m.prior = numeric_prior(make_initial_condition("loglambda", 0.0), trace);
        return m;
    }
    if (id.rfind("qfam:", 0) == 0) {
        m.prior = numeric_prior(make_initial_condition(id, 0.0), trace);
        return m;
    }
    if (id == "analytic-invpsi") {
        m.prior = analytic_prior([](const ParamPoint& w) {
            if (!(w.psi > 0.0)) throw DomainViolation("1/psi prior needs psi > 0");
            return -std::log(w.psi);
        });
        return m;
    }
    if (id == "analytic-invpsilambda") {
        m.prior = analytic_prior([](const ParamPoint& w) {
            if (!(w.psi > 0.0) || !(w.lambda > 0.0)) {
                throw DomainViolation("1/(psi lambda) prior needs positive parameters");
            }
            return -std::log(w.psi) - std::log(w.lambda);
        });
        return m;
    }
    throw InputError("unknown method: " + id);
}

ModelSpec make_model(const SimConfig& cfg) {
    if (cfg.model_id == "exp-ratio") return exp_ratio_model();
    if (cfg.model_id == "logistic") return logistic_model({0.0, 1.0});
    throw InputError("unknown model: " + cfg.model_id);
}

Dataset simulate_replicate(const ModelSpec& model, const SimConfig& cfg, Rng& rng) {
    if (cfg.model_id == "logistic") {
        // Fresh uniform covariates every replicate, held fixed afterwards;
        // all covariates are drawn before any response.
        Dataset data;
        data.x.reserve(cfg.n);
        data.y.reserve(cfg.n);
        for (std::size_t j = 0; j < cfg.n; ++j) data.x.push_back(rng.uniform01());
        for (std::size_t j = 0; j < cfg.n; ++j) {
            const double eta = cfg.true_params.lambda + cfg.true_params.psi * data.x[j];
            const double p = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta))
                                        : std::exp(eta) / (1.0 + std::exp(eta));
            data.y.push_back(rng.bernoulli(p) ? 1.0 : 0.0);
        }
        return data;
    }
    return model.simulate(cfg.true_params, cfg.n, rng);
}

SimReport run_type1_serial(const SimConfig& cfg) {
    validate(cfg);
    const ModelSpec model = make_model(cfg);
    const std::vector<Method> methods = resolve_methods(cfg);

    SimReport report;
    report.reps = cfg.reps;
    report.methods = blank_reports(methods);

    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < cfg.reps; ++i) {
        type1_replicate(model, cfg, methods, i, report.methods);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SimReport run_type1(const SimConfig& cfg) {
    validate(cfg);
    const ModelSpec model = make_model(cfg);
    const std::vector<Method> methods = resolve_methods(cfg);

    SimReport report;
    report.reps = cfg.reps;
    report.methods = blank_reports(methods);

    const auto t0 = std::chrono::steady_clock::now();
#ifdef _OPENMP
    const int requested = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel num_threads(requested)
    {
        std::vector<MethodReport> local = blank_reports(methods);
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(cfg.reps); ++i) {
            type1_replicate(model, cfg, methods, static_cast<std::uint64_t>(i), local);
        }
#pragma omp critical
        merge_into(report.methods, local);
    }
#else
    for (std::uint64_t i = 0; i < cfg.reps; ++i) {
        type1_replicate(model, cfg, methods, i, report.methods);
    }
#endif
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

namespace {

std::vector<CoverageMethodReport> blank_coverage(const std::vector<Method>& methods) {
    std::vector<CoverageMethodReport> out(methods.size());
    for (std::size_t j = 0; j < methods.size(); ++j) out[j].id = methods[j].id;
    return out;
}

void merge_coverage(std::vector<CoverageMethodReport>& totals,
                    const std::vector<CoverageMethodReport>& local) {
    for (std::size_t j = 0; j < totals.size(); ++j) {
        totals[j].covered += local[j].covered;
        totals[j].valid += local[j].valid;
        totals[j].degenerate_count += local[j].degenerate_count;
    }
}

std::vector<Method> resolve_coverage_methods(const SimConfig& cfg) {
    std::vector<Method> methods = resolve_methods(cfg);
    for (const auto& m : methods) {
        if (m.is_lrt) throw InputError("the lrt baseline has no credible interval");
    }
    return methods;
}

}  // namespace

CoverageReport run_coverage_serial(const SimConfig& cfg, double level) {
    validate(cfg);
    if (!(level > 0.0) || !(level < 1.0)) throw InputError("level must be in (0,1)");
    const ModelSpec model = make_model(cfg);
    const std::vector<Method> methods = resolve_coverage_methods(cfg);

    CoverageReport report;
    report.reps = cfg.reps;
    report.level = level;
    report.methods = blank_coverage(methods);

    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < cfg.reps; ++i) {
        coverage_replicate(model, cfg, level, methods, i, report.methods);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

CoverageReport run_coverage(const SimConfig& cfg, double level) {
    validate(cfg);
    if (!(level > 0.0) || !(level < 1.0)) throw InputError("level must be in (0,1)");
    const ModelSpec model = make_model(cfg);
    const std::vector<Method> methods = resolve_coverage_methods(cfg);

    CoverageReport report;
    report.reps = cfg.reps;
    report.level = level;
    report.methods = blank_coverage(methods);

    const auto t0 = std::chrono::steady_clock::now();
#ifdef _OPENMP
    const int requested = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel num_threads(requested)
    {
        std::vector<CoverageMethodReport> local = blank_coverage(methods);
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(cfg.reps); ++i) {
            coverage_replicate(model, cfg, level, methods, static_cast<std::uint64_t>(i),
                               local);
        }
#pragma omp critical
        merge_coverage(report.methods, local);
    }
#else
    for (std::uint64_t i = 0; i < cfg.reps; ++i) {
        coverage_replicate(model, cfg, level, methods, i, report.methods);
    }
#endif
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace matchprior
