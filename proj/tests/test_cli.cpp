#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

const char* cli = MATCHPRIOR_CLI_PATH;

// Runs the CLI with the given arguments, discarding output, and returns
// the process exit status.
int run(const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

// Runs the CLI and captures stdout.
std::string run_capture(const std::string& args, int& code) {
    const std::string out_path = "/tmp/matchprior_cli_test_out.txt";
    const std::string cmd =
        std::string(cli) + " " + args + " >" + out_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    code = WEXITSTATUS(status);
    std::ifstream in(out_path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::remove(out_path.c_str());
    return text;
}

struct TempCsv {
    std::string path;

    TempCsv(const char* tag, const std::string& content) {
        path = std::string("/tmp/matchprior_cli_test_") + tag + ".csv";
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

const char* exp_csv = "x,y\n1.2,2.1\n0.8,1.7\n1.0,2.4\n1.5,1.9\n0.9,2.2\n";

// Perfectly separated binary data: the slope MLE diverges.
const char* separated_csv = "x,y\n0.1,0\n0.2,0\n0.3,0\n0.8,1\n0.9,1\n1.0,1\n";

}  // namespace

TEST_CASE("cli: help and version exit cleanly") {
    CHECK(run("--help") == 0);
    CHECK(run("pvalue --help") == 0);
    CHECK(run("--version") == 0);
    int code = 0;
    const std::string v = run_capture("--version", code);
    CHECK(code == 0);
    CHECK(v.find("1.0.0") != std::string::npos);
}

TEST_CASE("cli: flag errors exit with the input-error status") {
    CHECK(run("") == 2);                       // no subcommand
    CHECK(run("pvalue") == 2);                 // missing required flags
    CHECK(run("frobnicate") == 2);             // unknown subcommand
    TempCsv data("flags", exp_csv);
    CHECK(run("pvalue --data " + data.path +
              " --model exp-ratio --psi0 1.0 --no-such-flag") == 2);
    CHECK(run("pvalue --data " + data.path + " --model weibull --psi0 1.0") == 2);
    CHECK(run("pvalue --data " + data.path +
              " --model exp-ratio --psi0 1.0 --format zz") == 2);
    CHECK(run("pvalue --data " + data.path +
              " --model exp-ratio --psi0 1.0 --ic mystery") == 2);
    CHECK(run("ci --data " + data.path + " --model exp-ratio --ic lrt") == 2);
}

TEST_CASE("cli: malformed data files exit with the input-error status") {
    TempCsv bad("bad", "x,y\n1.0,-2.0\n0.5,1.0\n");
    CHECK(run("pvalue --data " + bad.path + " --model exp-ratio --psi0 1.0") == 2);
    CHECK(run("pvalue --data /nonexistent.csv --model exp-ratio --psi0 1.0") == 2);
}

TEST_CASE("cli: numerical failures exit with the numeric-error status") {
    TempCsv sep("sep", separated_csv);
    CHECK(run("pvalue --data " + sep.path + " --model logistic --psi0 0.5") == 3);
}

TEST_CASE("cli: pvalue reports the tail pair and a manifest") {
    TempCsv data("pv", exp_csv);
    int code = -1;
    const std::string out = run_capture(
        "pvalue --data " + data.path + " --model exp-ratio --psi0 1.0", code);
    CHECK(code == 0);
    CHECK(out.find("one_sided") != std::string::npos);
    CHECK(out.find("two_sided") != std::string::npos);
    CHECK(out.find("--- manifest ---") != std::string::npos);
    CHECK(out.find("\"input_digest\": \"c741da6e647b4690\"") != std::string::npos);

    // The same invocation is byte-reproducible.
    int code2 = -1;
    CHECK(run_capture("pvalue --data " + data.path +
                          " --model exp-ratio --psi0 1.0",
                      code2) == out);

    // lrt baseline works and differs from the prior-based method.
    int code3 = -1;
    const std::string lrt = run_capture(
        "pvalue --data " + data.path + " --model exp-ratio --psi0 1.0 --ic lrt",
        code3);
    CHECK(code3 == 0);
    CHECK(lrt != out);
}

TEST_CASE("cli: ci prints an interval containing the estimate") {
    TempCsv data("ci", exp_csv);
    int code = -1;
    const std::string out = run_capture(
        "ci --data " + data.path + " --model exp-ratio --level 0.9", code);
    CHECK(code == 0);
    CHECK(out.find("lo") != std::string::npos);
    CHECK(out.find("hi") != std::string::npos);
    // psi_hat = 2.06/1.08 = 1.907...; both endpoints appear as numbers
    // around it, so the text contains "1." at least twice.
    CHECK(out.find("psi_hat") != std::string::npos);
}

TEST_CASE("cli: simulate writes tables and a manifest to --out") {
    const std::string out_dir = "/tmp/matchprior_cli_test_simout";
    std::system(("rm -rf " + out_dir).c_str());
    int code = -1;
    const std::string out = run_capture(
        "simulate --model exp-ratio --reps 50 --methods lrt --seed 7 --out " +
            out_dir,
        code);
    CHECK(code == 0);
    CHECK(out.find("lrt") != std::string::npos);
    std::ifstream csv(out_dir + "/table.csv");
    CHECK(csv.good());
    std::ifstream manifest(out_dir + "/manifest.json");
    CHECK(manifest.good());
    std::system(("rm -rf " + out_dir).c_str());
}

TEST_CASE("cli: simulate validates its arguments") {
    CHECK(run("simulate --model exp-ratio --reps 10 --alpha 0") == 2);
    CHECK(run("simulate --model exp-ratio --reps 10 --n 1") == 2);
    CHECK(run("simulate --model exp-ratio --reps 10 --methods nope") == 2);
    CHECK(run("simulate --model exp-ratio --reps 10 --study sideways") == 2);
    CHECK(run("simulate --model exp-ratio --reps 10 --convention diagonal") == 2);
}

TEST_CASE("cli: coverage study rejects the lrt baseline") {
    CHECK(run("simulate --model exp-ratio --reps 10 --study coverage "
              "--methods lrt") == 2);
}

TEST_CASE("cli: check passes on healthy grids and fails past the threshold") {
    CHECK(run("check --model exp-ratio --n 10 --grid 3") == 0);
    // An absurdly tight threshold turns quadrature noise into a failure.
    CHECK(run("check --model exp-ratio --n 10 --grid 3 --threshold 1e-16") == 1);
}
