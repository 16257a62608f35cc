#include <chrono>
#include <cstdio>
#include <string>

#include "matchprior/montecarlo.hpp"

// Compares the serial reference harness with the OpenMP one on identical
// configurations and verifies that their reports agree exactly.

namespace {

using namespace matchprior;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void bench_case(const char* label, const SimConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    const SimReport serial = run_type1_serial(cfg);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const SimReport parallel = run_type1(cfg);
    const double parallel_s = seconds_since(t0);

    std::printf("%-24s reps=%zu serial=%8.3fs parallel=%8.3fs speedup=%5.2fx %s\n",
                label, cfg.reps, serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0,
                serial == parallel ? "reports-match" : "REPORTS-DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t reps = 2000;
    if (argc > 1) reps = static_cast<std::size_t>(std::stoull(argv[1]));

    SimConfig exp_cfg;
    exp_cfg.model_id = "exp-ratio";
    exp_cfg.n = 10;
    exp_cfg.reps = reps;
    exp_cfg.methods = {"lrt", "ic-default", "ic-loglambda"};
    bench_case("exp-ratio n=10", exp_cfg);

    SimConfig log_cfg;
    log_cfg.model_id = "logistic";
    log_cfg.n = 30;
    log_cfg.reps = reps / 4 ? reps / 4 : 1;
    log_cfg.true_params = {0.5, -1.0};
    log_cfg.psi0 = 0.5;
    log_cfg.methods = {"lrt", "ic-default", "qfam:2/5"};
    bench_case("logistic n=30", log_cfg);

    return 0;
}
