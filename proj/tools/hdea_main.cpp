// Command-line front end: NK landscape generation, single runs, NK sweeps,
// budgeted comparisons, statistics on CSV columns, and the reference mock
// evaluator for the external-objective protocol.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdea/hdea.hpp"

namespace fs = std::filesystem;
using namespace hdea;

namespace {

int exit_code_for(const Error& e) {
    if (e.category() == "parameter" || e.category() == "representation") return 2;
    if (e.category() == "parse") return 3;
    if (e.category() == "evaluation") return 4;
    if (e.category() == "protocol") return 5;
    return 1;
}

nk::Landscape load_landscape(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("cannot open landscape file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return nk::deserialize(text);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write: " + path.string());
    out << text;
}

template <class G>
void finish_single_run(const RunTrace<G>& trace, const config::RunConfig& cfg,
                       const std::string& out_dir) {
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        harness::write_trace_csv(fs::path(out_dir) / "trace.csv", trace, 1);
        write_text_file(fs::path(out_dir) / "config.json", config::run_to_json(cfg).dump(2) + "\n");
    }
    std::cout << "final_best=" << csv::format_double(trace.final_best())
              << " final_mean=" << csv::format_double(trace.final_mean())
              << " evaluations=" << trace.total_evaluations
              << " samples=" << trace.total_samples << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = config::run_from_json(config::load_json_file(config_path));
    if (cfg.genome.kind == config::GenomeSpec::Kind::bits) {
        if (cfg.objective.kind != config::ObjectiveSpec::Kind::nk)
            throw ParameterError("bit genomes require an nk objective");
        auto sampler = std::make_shared<NkSampler>(load_landscape(cfg.objective.landscape_path));
        if (sampler->landscape().n != cfg.genome.length)
            throw ParameterError("genome length does not match landscape n");
        Objective<BitGenome> objective(sampler, cfg.objective.direction, cfg.objective.samples,
                                       cfg.ea.run_seed);
        const auto trace = run_from_spec(cfg.ea, objective, cfg.genome.length);
        finish_single_run(trace, cfg, out_dir);
        return 0;
    }
    if (cfg.objective.kind == config::ObjectiveSpec::Kind::nk)
        throw ParameterError("real genomes cannot use an nk objective");
    auto sampler = harness::detail::make_real_sampler(cfg.objective, cfg.genome.space);
    const auto obj_seed = cfg.objective.surrogate_seed.value_or(cfg.ea.run_seed);
    Objective<RealGenome> objective(sampler, cfg.objective.direction, cfg.objective.samples,
                                    obj_seed);
    const auto trace = run_from_spec(cfg.ea, objective, cfg.genome.space.bounds());
    finish_single_run(trace, cfg, out_dir);
    return 0;
}

void print_report_summary(const harness::ComparisonReport& report) {
    for (const auto& cell : report.cells) {
        for (const auto& a : cell.algorithms)
            std::cout << "n=" << cell.n << " k=" << cell.k << " " << to_string(a.algorithm)
                      << ": runs=" << a.runs
                      << " mean_final_best=" << csv::format_double(a.mean_final_best)
                      << " [" << csv::format_double(a.min_final_best) << ", "
                      << csv::format_double(a.max_final_best) << "]\n";
    }
    for (const auto& s : report.significance)
        std::cout << s.setting << " " << s.comparison << " " << s.test
                  << ": statistic=" << csv::format_double(s.statistic)
                  << " p=" << csv::format_double(s.p_value) << "\n";
    for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"haploid-diploid evolutionary algorithm toolkit"};
    app.require_subcommand(1);

    // gen-nk
    auto* gen = app.add_subcommand("gen-nk", "generate an NK landscape file");
    std::uint32_t gen_n = 20, gen_k = 4;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "genome length")->required();
    gen->add_option("--k", gen_k, "epistatic neighbors per gene")->required();
    gen->add_option("--seed", gen_seed, "landscape seed")->required();
    gen->add_option("--out", gen_out, "output path (default: stdout)");

    // run
    auto* runc = app.add_subcommand("run", "single run from a JSON config file");
    std::string run_config, run_out;
    runc->add_option("--config", run_config, "run config JSON")->required();
    runc->add_option("--out", run_out, "output directory for trace.csv + config.json");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "NK grid sweep from a JSON plan");
    std::string sweep_config, sweep_out;
    std::uint32_t sweep_threads = 0;
    sweep->add_option("--config", sweep_config, "sweep plan JSON")->required();
    sweep->add_option("--out", sweep_out, "output directory")->required();
    sweep->add_option("--threads", sweep_threads, "worker threads (0 = hardware)");

    // compare
    auto* compare = app.add_subcommand("compare", "budgeted real-valued comparison");
    std::string compare_config, compare_out;
    std::uint32_t compare_threads = 0;
    compare->add_option("--config", compare_config, "compare plan JSON")->required();
    compare->add_option("--out", compare_out, "output directory")->required();
    compare->add_option("--threads", compare_threads, "worker threads (0 = hardware)");

    // stats
    auto* statsc = app.add_subcommand("stats", "summary/tests over CSV columns");
    std::string stats_op, stats_a, stats_b, stats_column = "best";
    statsc->add_option("op", stats_op, "one of: summary, welch, wilcoxon")->required();
    statsc->add_option("file_a", stats_a, "first CSV file")->required();
    statsc->add_option("file_b", stats_b, "second CSV file (tests only)");
    statsc->add_option("--column", stats_column, "column name (default: best)");

    // eval-server
    auto* server = app.add_subcommand("eval-server", "run the reference mock evaluator");
    bool mock = false;
    std::string mock_mode = "constant";
    double mock_value = 480.0;
    double mock_noise = 0.0;
    long mock_fail_after = -1;
    bool mock_garbage = false;
    server->add_flag("--mock", mock, "serve the bundled mock evaluator");
    server->add_option("--mode", mock_mode, "constant | echo0 | surrogate");
    server->add_option("--value", mock_value, "constant mode value");
    server->add_option("--noise-sd", mock_noise, "surrogate mode noise SD");
    server->add_option("--fail-after", mock_fail_after, "exit abruptly after N results");
    server->add_flag("--garbage", mock_garbage, "emit a non-protocol line and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto land = nk::generate(gen_n, gen_k, gen_seed);
            const auto text = nk::serialize(land);
            if (gen_out.empty())
                std::cout << text;
            else
                write_text_file(gen_out, text);
            return 0;
        }
        if (runc->parsed()) return cmd_run(run_config, run_out);
        if (sweep->parsed()) {
            auto plan = harness::nk_plan_from_json(config::load_json_file(sweep_config));
            plan.out_dir = sweep_out;
            if (sweep_threads) plan.threads = sweep_threads;
            const auto report = harness::run_nk_sweep(plan);
            harness::export_report(report, sweep_out);
            print_report_summary(report);
            return report.errors.empty() ? 0 : 4;
        }
        if (compare->parsed()) {
            auto plan = harness::compare_plan_from_json(config::load_json_file(compare_config));
            plan.out_dir = compare_out;
            if (compare_threads) plan.threads = compare_threads;
            const auto report = harness::run_budgeted_compare(plan);
            harness::export_report(report, compare_out);
            print_report_summary(report);
            return report.errors.empty() ? 0 : 4;
        }
        if (statsc->parsed()) {
            if (stats_op == "summary") {
                const auto xs = csv::read_column(stats_a, stats_column);
                const auto s = stats::summarize(xs);
                std::cout << "n,mean,sd,median,kurtosis,min,max\n"
                          << s.n << "," << csv::format_double(s.mean) << ","
                          << csv::format_double(s.sd) << "," << csv::format_double(s.median)
                          << "," << csv::format_double(s.kurtosis) << ","
                          << csv::format_double(s.min) << "," << csv::format_double(s.max)
                          << "\n";
                return 0;
            }
            if (stats_b.empty()) throw ParameterError("tests need two CSV files");
            const auto xs = csv::read_column(stats_a, stats_column);
            const auto ys = csv::read_column(stats_b, stats_column);
            stats::TestResult r;
            if (stats_op == "welch")
                r = stats::welch_t_test(xs, ys);
            else if (stats_op == "wilcoxon")
                r = stats::wilcoxon_signed_rank(xs, ys);
            else
                throw ParameterError("unknown stats op '" + stats_op + "'");
            std::cout << "method,statistic,p_value\n"
                      << stats::to_string(r.method) << "," << csv::format_double(r.statistic)
                      << "," << csv::format_double(r.p_value) << "\n";
            return 0;
        }
        if (server->parsed()) {
            if (!mock) throw ParameterError("only the mock evaluator is bundled; pass --mock");
            proto::MockBehavior behavior;
            behavior.garbage = mock_garbage;
            behavior.fail_after = mock_fail_after;
            if (mock_mode == "constant") {
                behavior.mode = proto::MockBehavior::Mode::constant;
                behavior.constant_value = mock_value;
            } else if (mock_mode == "echo0") {
                behavior.mode = proto::MockBehavior::Mode::echo_first;
            } else if (mock_mode == "surrogate") {
                behavior.mode = proto::MockBehavior::Mode::surrogate;
                behavior.surrogate.noise_sd = mock_noise;
            } else {
                throw ParameterError("unknown mock mode '" + mock_mode + "'");
            }
            return proto::run_mock_eval_server(std::cin, std::cout, behavior);
        }
    } catch (const Error& e) {
        std::cerr << "error (" << e.category() << "): " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
