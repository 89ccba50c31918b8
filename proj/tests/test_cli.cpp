#include <catch2/catch.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hdea/csv.hpp"
#include "hdea/nk.hpp"
#include "hdea/subprocess.hpp"

using namespace hdea;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

const std::string kCli = HDEA_CLI_PATH;

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> argv{"/bin/sh", "-c", ""};
    std::string cmd = "'" + kCli + "'";
    for (const auto& a : args) cmd += " '" + a + "'";
    cmd += " 2>/dev/null; echo \"EXIT:$?\"";
    argv[2] = cmd;
    Subprocess child(argv);
    child.close_stdin();
    std::string out;
    int code = -1;
    while (auto line = child.read_line(60s)) {
        if (line->rfind("EXIT:", 0) == 0)
            code = std::stoi(line->substr(5));
        else
            out += *line + "\n";
    }
    return {code, out};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hdea_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("gen-nk emits a parseable, regenerable landscape") {
    const auto dir = fresh_dir("gen_nk");
    const auto path = (dir / "land.nk").string();
    const auto r = run_cli({"gen-nk", "--n", "10", "--k", "3", "--seed", "11", "--out", path});
    REQUIRE(r.exit_code == 0);
    const auto land = nk::deserialize(slurp(path));
    REQUIRE(land.n == 10);
    REQUIRE(land.k == 3);
    REQUIRE(land == nk::generate(10, 3, 11));
}

TEST_CASE("run executes a config file and writes trace plus sidecar") {
    const auto dir = fresh_dir("run_cmd");
    const auto land_path = (dir / "land.nk").string();
    REQUIRE(run_cli({"gen-nk", "--n", "12", "--k", "2", "--seed", "3", "--out", land_path})
                .exit_code == 0);
    write_file(dir / "run.json", R"({
        "algorithm": "hdea",
        "population_size": 8,
        "tournament_size": 2,
        "budget": 50,
        "run_seed": 4,
        "genome": {"kind": "bits", "length": 12},
        "objective": {"kind": "nk", "landscape": ")" + land_path + R"("}
    })");
    const auto out1 = dir / "out1";
    const auto out2 = dir / "out2";
    const auto r1 = run_cli({"run", "--config", (dir / "run.json").string(), "--out",
                             out1.string()});
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.out.find("final_best=") != std::string::npos);
    REQUIRE(fs::exists(out1 / "trace.csv"));
    REQUIRE(fs::exists(out1 / "config.json"));
    const auto r2 = run_cli({"run", "--config", (dir / "run.json").string(), "--out",
                             out2.string()});
    REQUIRE(slurp(out1 / "trace.csv") == slurp(out2 / "trace.csv"));
    REQUIRE(csv::read_column(out1 / "trace.csv", "best").size() == 51);
}

TEST_CASE("run handles real genomes against the surrogate objective") {
    const auto dir = fresh_dir("run_real");
    write_file(dir / "run.json", R"({
        "algorithm": "baseline",
        "population_size": 6,
        "tournament_size": 3,
        "budget": 10,
        "replacement": "tournament",
        "run_seed": 21,
        "variation": {"crossover": "uniform", "crossover_rate": 0.8,
                      "mutation": "per-allele-real", "per_allele_rate": 0.2,
                      "step_fraction": 0.05},
        "genome": {"kind": "real", "space": "worker-cell-design"},
        "objective": {"kind": "surrogate", "direction": "minimize", "samples": 2,
                      "noise_sd": 5.0, "seed": 77}
    })");
    const auto out = dir / "out";
    const auto r = run_cli({"run", "--config", (dir / "run.json").string(), "--out",
                            out.string()});
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("samples=32") != std::string::npos); // (6 + 10) evals x 2 samples
    REQUIRE(csv::read_column(out / "trace.csv", "mean").size() == 11);
}

TEST_CASE("stats subcommand reads CSV columns") {
    const auto dir = fresh_dir("stats_cmd");
    write_file(dir / "a.csv", "best\n1\n2\n3\n4\n");
    write_file(dir / "b.csv", "best\n1.5\n2.5\n3.5\n4.5\n");
    const auto sum = run_cli({"stats", "summary", (dir / "a.csv").string()});
    REQUIRE(sum.exit_code == 0);
    REQUIRE(sum.out.find("2.5") != std::string::npos); // mean
    const auto welch = run_cli({"stats", "welch", (dir / "a.csv").string(),
                                (dir / "b.csv").string()});
    REQUIRE(welch.exit_code == 0);
    REQUIRE(welch.out.find("welch-t") != std::string::npos);
    const auto wil = run_cli({"stats", "wilcoxon", (dir / "a.csv").string(),
                              (dir / "b.csv").string()});
    REQUIRE(wil.exit_code == 0);
    REQUIRE(wil.out.find("wilcoxon-signed-rank-exact") != std::string::npos);
}

TEST_CASE("sweep subcommand produces the report files") {
    const auto dir = fresh_dir("sweep_cmd");
    write_file(dir / "plan.json", R"({
        "n_values": [10], "k_values": [2],
        "landscapes_per_setting": 1, "runs_per_landscape": 2,
        "population_size": 6, "budget": 20, "base_seed": 9
    })");
    const auto out = dir / "out";
    const auto r = run_cli({"sweep", "--config", (dir / "plan.json").string(), "--out",
                            out.string(), "--threads", "1"});
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(out / "summary.csv"));
    REQUIRE(fs::exists(out / "significance.csv"));
    REQUIRE(fs::exists(out / "runs.csv"));
    REQUIRE(fs::exists(out / "config.json"));
}

TEST_CASE("compare subcommand runs the surrogate objective") {
    const auto dir = fresh_dir("compare_cmd");
    write_file(dir / "plan.json", R"({
        "runs": 2, "population_size": 6, "budget": 4, "samples": 2,
        "base_seed": 31,
        "objective": {"kind": "surrogate", "direction": "minimize", "noise_sd": 5.0}
    })");
    const auto out = dir / "out";
    const auto r = run_cli({"compare", "--config", (dir / "plan.json").string(), "--out",
                            out.string(), "--threads", "1"});
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(out / "curve_best_hdea.csv"));
    REQUIRE(fs::exists(out / "params_best_baseline.csv"));
    REQUIRE(fs::exists(out / "samples_hdea.csv"));
}

TEST_CASE("cli reports categorized exit codes") {
    // parameter error -> 2
    REQUIRE(run_cli({"gen-nk", "--n", "3", "--k", "5", "--seed", "1"}).exit_code == 2);
    // parse error -> 3
    const auto dir = fresh_dir("exit_codes");
    write_file(dir / "bad.json", "{ not json");
    REQUIRE(run_cli({"run", "--config", (dir / "bad.json").string()}).exit_code == 3);
    // missing config file -> parameter error
    REQUIRE(run_cli({"run", "--config", (dir / "absent.json").string()}).exit_code == 2);
}
