#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matchprior/approx.hpp"
#include "matchprior/io.hpp"
#include "matchprior/montecarlo.hpp"
#include "matchprior/version.hpp"

namespace {

using namespace matchprior;

constexpr std::uint64_t default_seed = 42;

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TraceConvention parse_convention(const std::string& name) {
    if (name == "backward") return TraceConvention::backward;
    if (name == "forward") return TraceConvention::forward;
    throw InputError("unknown trace convention: " + name);
}

Format parse_format(const std::string& name) {
    if (name == "bn") return Format::bn;
    if (name == "lr") return Format::lr;
    throw InputError("unknown format: " + name);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

ModelSpec model_for_data(const std::string& model_id, const Dataset& data) {
    if (model_id == "exp-ratio") return exp_ratio_model();
    return logistic_model(data.x);
}

void emit_manifest(const RunManifest& manifest, const std::string& out_dir,
                   const std::string& filename) {
    const std::string json = manifest.to_json();
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_text_file((std::filesystem::path(out_dir) / filename).string(), json);
    }
    std::cout << "--- manifest ---\n" << json;
}

// Shared per-subcommand flag set.
struct CommonArgs {
    std::string data_path;
    std::string model_id;
    std::string ic_name = "default";
    std::string format_name = "bn";
    std::string convention_name = "backward";
    std::uint64_t seed = default_seed;
    std::string out_dir;
    int threads = 0;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool needs_data) {
    if (needs_data) {
        cmd->add_option("--data", args.data_path, "input dataset CSV (header x,y)")
            ->required();
    }
    cmd->add_option("--model", args.model_id, "exp-ratio or logistic")->required();
    cmd->add_option("--ic", args.ic_name,
                    "prior: default, loglambda, qfam:<q>, analytic-invpsi, "
                    "analytic-invpsilambda");
    cmd->add_option("--format", args.format_name, "tail format: bn or lr");
    cmd->add_option("--convention", args.convention_name,
                    "characteristic trace convention: backward or forward");
    cmd->add_option("--seed", args.seed, "master seed (recorded in the manifest)");
    cmd->add_option("--out", args.out_dir, "directory for output files");
    cmd->add_option("--threads", args.threads, "worker threads (0 = runtime default)");
}

RunManifest base_manifest(const std::string& subcommand, const CommonArgs& args) {
    RunManifest m;
    m.subcommand = subcommand;
    m.seed = args.seed;
    m.version = k_version;
    m.config["model"] = args.model_id;
    m.config["ic"] = args.ic_name;
    m.config["format"] = args.format_name;
    m.config["convention"] = args.convention_name;
    m.config["threads"] = std::to_string(args.threads);
    if (!args.data_path.empty()) {
        m.config["data"] = args.data_path;
        m.input_digest = file_digest_hex(args.data_path);
    }
    return m;
}

int run_pvalue(const CommonArgs& args, double psi0) {
    const Dataset data = read_dataset_csv(args.data_path, args.model_id);
    const ModelSpec model = model_for_data(args.model_id, data);
    const Format format = parse_format(args.format_name);
    TraceOptions trace;
    trace.convention = parse_convention(args.convention_name);
    const Method method = parse_method(args.ic_name, trace);

    const FitResult full = mle(model, data);
    const FitResult constrained = constrained_mle(model, data, psi0);
    const double R = signed_root(full, constrained, psi0);
    const TailResult tails =
        method.is_lrt ? evaluate_tails(R, R)
                      : tail_result_from(model, data, full, constrained, psi0,
                                         method.prior);
    const PValues pv = p_values(tails, format);

    std::cout << "model:         " << args.model_id << "\n"
              << "n:             " << data.size() << "\n"
              << "psi0:          " << g6(psi0) << "\n"
              << "psi_hat:       " << g6(full.point.psi) << "\n"
              << "lambda_hat:    " << g6(full.point.lambda) << "\n"
              << "R:             " << g6(tails.R) << "\n"
              << "T:             " << g6(tails.T) << "\n"
              << "format:        " << args.format_name << "\n"
              << "one_sided:     " << g6(pv.one_sided) << "\n"
              << "two_sided:     " << g6(pv.two_sided) << "\n"
              << "near_singular: " << (tails.near_singular ? "yes" : "no") << "\n"
              << "lr_clamped:    " << (tails.lr_clamped ? "yes" : "no") << "\n";

    RunManifest manifest = base_manifest("pvalue", args);
    manifest.config["psi0"] = g17(psi0);
    emit_manifest(manifest, args.out_dir, "manifest.json");
    return 0;
}

int run_ci(const CommonArgs& args, double level) {
    const Dataset data = read_dataset_csv(args.data_path, args.model_id);
    const ModelSpec model = model_for_data(args.model_id, data);
    const Format format = parse_format(args.format_name);
    TraceOptions trace;
    trace.convention = parse_convention(args.convention_name);
    const Method method = parse_method(args.ic_name, trace);
    if (method.is_lrt) throw InputError("the lrt baseline has no credible interval");

    const FitResult full = mle(model, data);
    const CredibleInterval ci =
        credible_interval(model, data, method.prior, level, format);

    std::cout << "model:    " << args.model_id << "\n"
              << "n:        " << data.size() << "\n"
              << "psi_hat:  " << g6(full.point.psi) << "\n"
              << "level:    " << g6(level) << "\n"
              << "format:   " << args.format_name << "\n"
              << "lo:       " << g6(ci.lo) << "\n"
              << "hi:       " << g6(ci.hi) << "\n";

    RunManifest manifest = base_manifest("ci", args);
    manifest.config["level"] = g17(level);
    emit_manifest(manifest, args.out_dir, "manifest.json");
    return 0;
}

struct SimulateArgs {
    CommonArgs common;
    std::size_t n = 0;
    std::size_t reps = 0;
    double alpha = 0.05;
    double psi = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double psi0 = std::numeric_limits<double>::quiet_NaN();
    std::string methods;
    std::string study = "type1";
    double level = 0.95;
};

int run_simulate(const SimulateArgs& sim) {
    const bool logistic = sim.common.model_id == "logistic";

    SimConfig cfg;
    cfg.model_id = sim.common.model_id;
    cfg.n = sim.n ? sim.n : (logistic ? 30 : 10);
    cfg.reps = sim.reps ? sim.reps : (logistic ? 10000 : 100000);
    cfg.true_params.psi = std::isnan(sim.psi) ? (logistic ? 0.5 : 1.0) : sim.psi;
    cfg.true_params.lambda =
        std::isnan(sim.lambda) ? (logistic ? -1.0 : 1.0) : sim.lambda;
    cfg.psi0 = std::isnan(sim.psi0) ? cfg.true_params.psi : sim.psi0;
    cfg.alpha = sim.alpha;
    cfg.master_seed = sim.common.seed;
    cfg.threads = sim.common.threads;
    cfg.trace.convention = parse_convention(sim.common.convention_name);
    cfg.methods = sim.methods.empty()
                      ? (logistic ? split_list("lrt,ic-default,qfam:2,qfam:2/5,qfam:2/11")
                                  : split_list("lrt,ic-default,analytic-invpsi,"
                                               "ic-loglambda,analytic-invpsilambda"))
                      : split_list(sim.methods);

    const std::string out_dir =
        sim.common.out_dir.empty() ? "." : sim.common.out_dir;
    std::filesystem::create_directories(out_dir);
    const auto out_path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    RunManifest manifest = base_manifest("simulate", sim.common);
    manifest.config["n"] = std::to_string(cfg.n);
    manifest.config["reps"] = std::to_string(cfg.reps);
    manifest.config["alpha"] = g17(cfg.alpha);
    manifest.config["psi"] = g17(cfg.true_params.psi);
    manifest.config["lambda"] = g17(cfg.true_params.lambda);
    manifest.config["psi0"] = g17(cfg.psi0);
    manifest.config["study"] = sim.study;
    std::string joined;
    for (const auto& m : cfg.methods) joined += (joined.empty() ? "" : ",") + m;
    manifest.config["methods"] = joined;

    if (sim.study == "type1") {
        const SimReport report = run_type1(cfg);
        const std::string table = report_table(report);
        std::cout << table;
        std::cerr << "wall_seconds: " << report.wall_seconds << "\n";
        write_text_file(out_path("table.csv"), report_csv(report));
        write_text_file(out_path("table.txt"), table);
    } else if (sim.study == "coverage") {
        manifest.config["level"] = g17(sim.level);
        const CoverageReport report = run_coverage(cfg, sim.level);
        const std::string table = coverage_table(report);
        std::cout << table;
        std::cerr << "wall_seconds: " << report.wall_seconds << "\n";
        write_text_file(out_path("coverage.csv"), coverage_csv(report));
        write_text_file(out_path("coverage.txt"), table);
    } else {
        throw InputError("unknown study: " + sim.study);
    }

    emit_manifest(manifest, out_dir, "manifest.json");
    return 0;
}

struct CheckArgs {
    CommonArgs common;
    std::size_t n = 10;
    int grid = 5;
    double psi_lo = std::numeric_limits<double>::quiet_NaN();
    double psi_hi = std::numeric_limits<double>::quiet_NaN();
    double lambda_lo = std::numeric_limits<double>::quiet_NaN();
    double lambda_hi = std::numeric_limits<double>::quiet_NaN();
    double threshold = 1e-4;
};

// Synthetic dataset fixing the information shape for a residual check:
// only the sample size matters for exp-ratio, only the covariate design
// for logistic.
Dataset design_dataset(const std::string& model_id, std::size_t n) {
    Dataset data;
    for (std::size_t j = 0; j < n; ++j) {
        data.x.push_back(model_id == "logistic" ? static_cast<double>(j % 2) : 1.0);
        data.y.push_back(model_id == "logistic" ? 0.0 : 1.0);
    }
    return data;
}

int run_check(const CheckArgs& chk) {
    const bool logistic = chk.common.model_id == "logistic";
    if (!logistic && chk.common.model_id != "exp-ratio") {
        throw InputError("unknown model: " + chk.common.model_id);
    }
    const double psi_lo = std::isnan(chk.psi_lo) ? (logistic ? -1.0 : 0.5) : chk.psi_lo;
    const double psi_hi = std::isnan(chk.psi_hi) ? (logistic ? 1.0 : 2.0) : chk.psi_hi;
    const double la_lo =
        std::isnan(chk.lambda_lo) ? (logistic ? -1.0 : 0.5) : chk.lambda_lo;
    const double la_hi =
        std::isnan(chk.lambda_hi) ? (logistic ? 1.0 : 2.0) : chk.lambda_hi;
    if (!(psi_lo < psi_hi) || !(la_lo < la_hi) || chk.grid < 1) {
        throw InputError("invalid residual grid");
    }

    const Dataset data = design_dataset(chk.common.model_id, chk.n);
    const ModelSpec model = model_for_data(chk.common.model_id, data);

    TraceOptions tight;
    tight.rtol = 1e-10;
    tight.atol = 1e-12;
    tight.n_panels = 256;
    tight.convention = parse_convention(chk.common.convention_name);
    const Method method = parse_method(chk.common.ic_name, tight);
    if (method.is_lrt) throw InputError("lrt is not a prior; nothing to check");

    const double anchor = 0.5 * (psi_lo + psi_hi);
    const auto log_prior = [&](const ParamPoint& w) {
        if (method.prior.log_prior) return method.prior.log_prior(w);
        InitialCondition ic = *method.prior.ic;
        ic.s0 = anchor;
        return trace_characteristic(model, data, ic, w, tight).z_value;
    };

    double max_abs = 0.0;
    ParamPoint argmax{};
    for (int i = 0; i < chk.grid; ++i) {
        for (int j = 0; j < chk.grid; ++j) {
            const ParamPoint w{
                psi_lo + (psi_hi - psi_lo) * (i + 1.0) / (chk.grid + 1.0),
                la_lo + (la_hi - la_lo) * (j + 1.0) / (chk.grid + 1.0)};
            const double r = std::abs(pde_residual(model, data, log_prior, w));
            if (r > max_abs) {
                max_abs = r;
                argmax = w;
            }
        }
    }

    std::cout << "model:        " << chk.common.model_id << "\n"
              << "ic:           " << chk.common.ic_name << "\n"
              << "grid:         " << chk.grid << "x" << chk.grid << "\n"
              << "max_residual: " << g6(max_abs) << " at (psi=" << g6(argmax.psi)
              << ", lambda=" << g6(argmax.lambda) << ")\n"
              << "threshold:    " << g6(chk.threshold) << "\n"
              << "status:       " << (max_abs <= chk.threshold ? "ok" : "exceeded")
              << "\n";

    RunManifest manifest = base_manifest("check", chk.common);
    manifest.config["n"] = std::to_string(chk.n);
    manifest.config["grid"] = std::to_string(chk.grid);
    manifest.config["psi_lo"] = g17(psi_lo);
    manifest.config["psi_hi"] = g17(psi_hi);
    manifest.config["lambda_lo"] = g17(la_lo);
    manifest.config["lambda_hi"] = g17(la_hi);
    manifest.config["threshold"] = g17(chk.threshold);
    emit_manifest(manifest, chk.common.out_dir, "manifest.json");
    return max_abs <= chk.threshold ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matching-prior tail approximations and simulation studies"};
    app.set_version_flag("--version", matchprior::k_version);
    app.require_subcommand(1);

    CommonArgs pvalue_args;
    double psi0 = 0.0;
    CLI::App* pvalue = app.add_subcommand("pvalue", "p-values for psi = psi0 on a dataset");
    add_common_flags(pvalue, pvalue_args, true);
    pvalue->add_option("--psi0", psi0, "null value of the interest parameter")->required();

    CommonArgs ci_args;
    double level = 0.95;
    CLI::App* ci = app.add_subcommand("ci", "credible interval for psi on a dataset");
    add_common_flags(ci, ci_args, true);
    ci->add_option("--level", level, "credible level in (0,1)");

    SimulateArgs sim;
    CLI::App* simulate =
        app.add_subcommand("simulate", "type-I-error or coverage study");
    add_common_flags(simulate, sim.common, false);
    simulate->add_option("--n", sim.n, "sample size (model default when omitted)");
    simulate->add_option("--reps", sim.reps, "replicates (model default when omitted)");
    simulate->add_option("--alpha", sim.alpha, "nominal level");
    simulate->add_option("--psi", sim.psi, "true interest parameter");
    simulate->add_option("--lambda", sim.lambda, "true nuisance parameter");
    simulate->add_option("--psi0", sim.psi0, "null value (defaults to --psi)");
    simulate->add_option("--methods", sim.methods, "comma-separated method ids");
    simulate->add_option("--study", sim.study, "type1 or coverage");
    simulate->add_option("--level", sim.level, "credible level for coverage study");

    CheckArgs chk;
    CLI::App* check =
        app.add_subcommand("check", "matching-prior equation residual diagnostics");
    add_common_flags(check, chk.common, false);
    check->add_option("--n", chk.n, "sample size defining the information shape");
    check->add_option("--grid", chk.grid, "grid points per axis");
    check->add_option("--psi-lo", chk.psi_lo, "psi grid lower edge");
    check->add_option("--psi-hi", chk.psi_hi, "psi grid upper edge");
    check->add_option("--lambda-lo", chk.lambda_lo, "lambda grid lower edge");
    check->add_option("--lambda-hi", chk.lambda_hi, "lambda grid upper edge");
    check->add_option("--threshold", chk.threshold, "failure threshold for |residual|");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (pvalue->parsed()) return run_pvalue(pvalue_args, psi0);
        if (ci->parsed()) return run_ci(ci_args, level);
        if (simulate->parsed()) return run_simulate(sim);
        if (check->parsed()) return run_check(chk);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const matchprior::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const matchprior::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
