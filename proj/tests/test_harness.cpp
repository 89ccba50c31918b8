#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "hdea/harness.hpp"

using namespace hdea;
namespace fs = std::filesystem;

namespace {

const std::string kCli = HDEA_CLI_PATH;

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "hdea_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
    return out;
}

harness::NkSweepPlan smoke_plan(const std::string& out_dir) {
    harness::NkSweepPlan plan;
    plan.n_values = {12};
    plan.k_values = {2};
    plan.landscapes_per_setting = 1;
    plan.runs_per_landscape = 1;
    plan.population_size = 6;
    plan.budget = 10;
    plan.base_seed = 42;
    plan.threads = 1;
    plan.out_dir = out_dir;
    return plan;
}

harness::ComparePlan surrogate_plan(const std::string& out_dir, std::uint32_t runs = 3) {
    harness::ComparePlan plan;
    plan.runs = runs;
    plan.population_size = 6;
    plan.budget = 5;
    plan.samples = 2;
    plan.objective.kind = config::ObjectiveSpec::Kind::surrogate;
    plan.objective.direction = Direction::minimize;
    plan.objective.surrogate.noise_sd = 5.0;
    plan.base_seed = 7;
    plan.threads = 1;
    plan.out_dir = out_dir;
    return plan;
}

} // namespace

TEST_CASE("nk sweep smoke run produces one cell and two traces") {
    const auto dir = fresh_dir("sweep_smoke");
    const auto report = harness::run_nk_sweep(smoke_plan(dir.string()));
    REQUIRE(report.errors.empty());
    REQUIRE(report.cells.size() == 1);
    REQUIRE(report.cells[0].complete);
    REQUIRE(report.runs.size() == 2); // baseline + hdea
    REQUIRE(report.budget_parity());
    for (const auto& r : report.runs) {
        REQUIRE(r.evaluations == 6 + 10);
        REQUIRE(r.best_monotone);
        REQUIRE(fs::exists(dir / r.trace_path));
    }
    harness::export_report(report, dir);
    REQUIRE(fs::exists(dir / "summary.csv"));
    REQUIRE(fs::exists(dir / "significance.csv"));
    REQUIRE(fs::exists(dir / "runs.csv"));
    REQUIRE(fs::exists(dir / "config.json"));
    // min <= mean <= max in every summary row
    for (const auto& cell : report.cells)
        for (const auto& a : cell.algorithms) {
            REQUIRE(a.min_final_best <= a.mean_final_best);
            REQUIRE(a.mean_final_best <= a.max_final_best);
        }
}

TEST_CASE("repeating a seeded sweep yields byte-identical files") {
    const auto dir1 = fresh_dir("sweep_det1");
    const auto dir2 = fresh_dir("sweep_det2");
    auto plan = smoke_plan(dir1.string());
    plan.runs_per_landscape = 2;
    plan.landscapes_per_setting = 2;
    plan.threads = 2; // merge order must not depend on scheduling
    const auto r1 = harness::run_nk_sweep(plan);
    harness::export_report(r1, dir1);
    plan.out_dir = dir2.string();
    const auto r2 = harness::run_nk_sweep(plan);
    harness::export_report(r2, dir2);
    REQUIRE(dir_contents(dir1) == dir_contents(dir2));
}

TEST_CASE("re-exporting a report is idempotent") {
    const auto dir = fresh_dir("reexport");
    const auto report = harness::run_nk_sweep(smoke_plan(dir.string()));
    harness::export_report(report, dir);
    const auto before = dir_contents(dir);
    harness::export_report(report, dir);
    REQUIRE(dir_contents(dir) == before);
}

TEST_CASE("paired algorithms share the initial population") {
    const auto dir = fresh_dir("paired_init");
    auto plan = smoke_plan(dir.string());
    plan.budget = 1;
    const auto report = harness::run_nk_sweep(plan);
    REQUIRE(report.runs.size() == 2);
    // generation-0 rows of the two trace files must match exactly
    std::vector<std::string> first_rows;
    for (const auto& r : report.runs) {
        const auto text = slurp(dir / r.trace_path);
        const auto first_nl = text.find('\n');
        const auto second_nl = text.find('\n', first_nl + 1);
        first_rows.push_back(text.substr(first_nl + 1, second_nl - first_nl - 1));
    }
    REQUIRE(first_rows[0] == first_rows[1]);
}

TEST_CASE("trace stride keeps the first and last records") {
    const auto dir = fresh_dir("stride");
    auto plan = smoke_plan(dir.string());
    plan.budget = 10;
    plan.trace_stride = 4;
    const auto report = harness::run_nk_sweep(plan);
    const auto text = slurp(dir / report.runs[0].trace_path);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    REQUIRE(lines[0] == "generation,best,mean,offspring");
    REQUIRE(lines[1].substr(0, 2) == "0,");
    REQUIRE(lines.back().substr(0, 3) == "10,"); // final generation always present
    REQUIRE(lines.size() == 1 + 1 + 2 + 1);      // header, gen0, gens 4 and 8, gen10
}

TEST_CASE("surrogate compare produces curves, params, and significance") {
    const auto dir = fresh_dir("compare_smoke");
    const auto report = harness::run_budgeted_compare(surrogate_plan(dir.string()));
    REQUIRE(report.errors.empty());
    REQUIRE(report.runs.size() == 6);
    REQUIRE(report.budget_parity());
    for (const auto& r : report.runs) REQUIRE(r.evaluations == 5); // shared init not recounted
    REQUIRE(report.curves.size() == 4); // best+mean for each algorithm
    REQUIRE(report.significance.size() == 2);
    REQUIRE(report.dim_names.size() == 6);
    REQUIRE(report.best_params.size() == 6);
    // per-sample retention: (P + budget) evals * 2 samples per run per algorithm
    REQUIRE(!report.samples.empty());
    harness::export_report(report, dir);
    REQUIRE(fs::exists(dir / "curve_best_hdea.csv"));
    REQUIRE(fs::exists(dir / "curve_mean_baseline.csv"));
    REQUIRE(fs::exists(dir / "params_best_hdea.csv"));
    REQUIRE(fs::exists(dir / "samples_baseline.csv"));
}

TEST_CASE("compare runs share the evaluated initial population") {
    const auto dir = fresh_dir("compare_shared");
    auto plan = surrogate_plan(dir.string(), 2);
    plan.budget = 0;
    const auto report = harness::run_budgeted_compare(plan);
    REQUIRE(report.errors.empty());
    // with no offspring budget both algorithms report the identical initial best
    std::map<std::uint32_t, std::vector<double>> by_run;
    for (const auto& r : report.runs) by_run[r.run_index].push_back(r.final_best);
    for (const auto& [run, finals] : by_run) {
        REQUIRE(finals.size() == 2);
        REQUIRE(finals[0] == finals[1]);
    }
}

TEST_CASE("constant external mock gives flat curves and p=1") {
    const auto dir = fresh_dir("compare_mock");
    harness::ComparePlan plan;
    plan.runs = 2;
    plan.population_size = 4;
    plan.budget = 3;
    plan.samples = 2;
    plan.objective.kind = config::ObjectiveSpec::Kind::external;
    plan.objective.direction = Direction::minimize;
    plan.objective.command = {kCli, "eval-server", "--mock", "--mode", "constant", "--value",
                              "480"};
    plan.base_seed = 5;
    plan.threads = 1;
    plan.out_dir = dir.string();
    const auto report = harness::run_budgeted_compare(plan);
    REQUIRE(report.errors.empty());
    for (const auto& curve : report.curves)
        for (std::size_t i = 0; i < curve.band.mean.size(); ++i) {
            REQUIRE(curve.band.mean[i] == 480.0);
            REQUIRE(curve.band.lower[i] == 480.0);
            REQUIRE(curve.band.upper[i] == 480.0);
        }
    for (const auto& s : report.significance) REQUIRE(s.p_value == 1.0);
    for (const auto& r : report.runs) REQUIRE(r.samples == 3 * 2);
}

TEST_CASE("compare determinism across repeats") {
    const auto dir1 = fresh_dir("compare_det1");
    const auto dir2 = fresh_dir("compare_det2");
    auto plan = surrogate_plan(dir1.string(), 3);
    plan.threads = 2;
    const auto r1 = harness::run_budgeted_compare(plan);
    harness::export_report(r1, dir1);
    plan.out_dir = dir2.string();
    const auto r2 = harness::run_budgeted_compare(plan);
    harness::export_report(r2, dir2);
    REQUIRE(dir_contents(dir1) == dir_contents(dir2));
}

TEST_CASE("failed cells are recorded, not silently dropped") {
    const auto dir = fresh_dir("compare_fail");
    harness::ComparePlan plan;
    plan.runs = 1;
    plan.population_size = 4;
    plan.budget = 2;
    plan.samples = 1;
    plan.objective.kind = config::ObjectiveSpec::Kind::external;
    plan.objective.command = {"/bin/false"};
    plan.base_seed = 1;
    plan.threads = 1;
    plan.out_dir = dir.string();
    const auto report = harness::run_budgeted_compare(plan);
    REQUIRE(report.runs.empty());
    REQUIRE(report.errors.size() == 1);
    REQUIRE_FALSE(report.cells[0].complete);
    harness::export_report(report, dir);
    REQUIRE(fs::exists(dir / "errors.csv"));
}

TEST_CASE("an empty report exports header-only CSVs") {
    const auto dir = fresh_dir("empty_report");
    harness::export_report(harness::ComparisonReport{}, dir);
    REQUIRE(slurp(dir / "summary.csv") ==
            "n,k,algorithm,runs,mean_final_best,min_final_best,max_final_best,sd_final_best,"
            "mean_final_mean,mean_evaluations,complete\n");
    REQUIRE(slurp(dir / "significance.csv") == "setting,comparison,test,statistic,p_value\n");
    REQUIRE(slurp(dir / "runs.csv") ==
            "n,k,landscape,run,algorithm,final_best,final_mean,evaluations,samples,"
            "best_monotone,trace\n");
}

TEST_CASE("plan json round-trips") {
    auto plan = smoke_plan("");
    const auto j = harness::nk_plan_to_json(plan);
    const auto back = harness::nk_plan_from_json(j);
    REQUIRE(back.n_values == plan.n_values);
    REQUIRE(back.k_values == plan.k_values);
    REQUIRE(back.budget == plan.budget);
    REQUIRE(back.base_seed == plan.base_seed);

    harness::ComparePlan cplan;
    cplan.objective.kind = config::ObjectiveSpec::Kind::surrogate;
    const auto cj = harness::compare_plan_to_json(cplan);
    const auto cback = harness::compare_plan_from_json(cj);
    REQUIRE(cback.runs == cplan.runs);
    REQUIRE(cback.samples == cplan.samples);
    REQUIRE(cback.space.size() == 6);
}

TEST_CASE("run config json round-trips") {
    const auto j = nlohmann::json::parse(R"({
        "algorithm": "hdea",
        "population_size": 30,
        "tournament_size": 2,
        "budget": 1000,
        "run_seed": 5,
        "variation": {"crossover": "one-point", "crossover_rate": 1.0,
                      "mutation": "single-bit-flip"},
        "genome": {"kind": "bits", "length": 50},
        "objective": {"kind": "nk", "landscape": "x.nk", "samples": 1}
    })");
    const auto cfg = config::run_from_json(j);
    REQUIRE(cfg.ea.algorithm == Algorithm::hdea);
    REQUIRE(cfg.ea.population_size == 30);
    REQUIRE(cfg.genome.length == 50);
    REQUIRE(cfg.objective.kind == config::ObjectiveSpec::Kind::nk);
    const auto back = config::run_from_json(config::run_to_json(cfg));
    REQUIRE(back.ea.budget == 1000);
    REQUIRE_THROWS_AS(config::run_from_json(nlohmann::json::object()), nlohmann::json::exception);
}
