#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdea/config.hpp"
#include "hdea/csv.hpp"
#include "hdea/error.hpp"
#include "hdea/evolve.hpp"
#include "hdea/external.hpp"
#include "hdea/nk.hpp"
#include "hdea/objective.hpp"
#include "hdea/stats.hpp"

// Experiment orchestration. A sweep's entire output is a pure function of its
// plan: landscape seeds, population-init seeds, and run seeds all derive from
// the plan's base seed, runs execute in parallel but merge by index, and CSVs
// are written with the fixed dialect in csv.hpp, so repeating a plan yields
// byte-identical files.
//
// Seed scheme (tags keep the substreams disjoint):
//   landscape seed = derive(base, {1, n, k, landscape_idx})
//   init-pop  seed = derive(base, {2, n, k, landscape_idx, run_idx})   [no algorithm:
//                    paired algorithms share the initial population]
//   run       seed = derive(base, {3, n, k, landscape_idx, run_idx, algorithm_id})
//   objective seed = derive(base, {4, run_idx, algorithm_id})          [compare runs]
// Algorithm ids: baseline=0, hdea=1, control-2p=2; the shared initial
// evaluation of a compare run uses id 1000.

namespace hdea::harness {

namespace fs = std::filesystem;

inline constexpr std::uint64_t kTagLandscape = 1;
inline constexpr std::uint64_t kTagInit = 2;
inline constexpr std::uint64_t kTagRun = 3;
inline constexpr std::uint64_t kTagObjective = 4;
inline constexpr std::uint64_t kInitEvalId = 1000;

inline std::uint64_t algorithm_id(Algorithm a) {
    switch (a) {
    case Algorithm::baseline: return 0;
    case Algorithm::hdea: return 1;
    case Algorithm::control_2p: return 2;
    }
    return ~0ull;
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

struct NkSweepPlan {
    std::vector<std::uint32_t> n_values{50};
    std::vector<std::uint32_t> k_values{0, 4, 10};
    std::vector<Algorithm> algorithms{Algorithm::baseline, Algorithm::hdea};
    std::uint32_t landscapes_per_setting = 10;
    std::uint32_t runs_per_landscape = 10;
    std::uint32_t population_size = 30;
    std::uint32_t tournament_size = 2;
    std::uint64_t budget = 20'000;
    VariationConfig variation; // defaults: one-point, X=1, single-bit-flip
    std::uint64_t base_seed = 1;
    std::uint32_t threads = 0;      // 0 = hardware concurrency
    std::uint32_t trace_stride = 1; // write every Nth generation record (first/last always)
    bool write_traces = true;
    std::string out_dir;

    void validate() const {
        if (n_values.empty() || k_values.empty()) throw ParameterError("empty N/K grid");
        if (algorithms.empty()) throw ParameterError("no algorithms to run");
        if (landscapes_per_setting < 1 || runs_per_landscape < 1)
            throw ParameterError("landscapes/runs must be >= 1");
        variation.validate();
    }
};

struct ComparePlan {
    std::vector<Algorithm> algorithms{Algorithm::baseline, Algorithm::hdea};
    std::uint32_t runs = 30;
    std::uint32_t population_size = 50;
    std::uint32_t tournament_size = 3; // selection and replacement
    std::uint64_t budget = 100;
    std::uint32_t samples = 5;
    ReplacementKind replacement = ReplacementKind::tournament;
    VariationConfig variation{CrossoverKind::uniform, 0.8, MutationKind::per_allele_real, 0.2,
                              0.05};
    SearchSpace space = SearchSpace::worker_cell_design();
    config::ObjectiveSpec objective; // surrogate or external; direction minimize by default
    std::uint64_t base_seed = 1;
    std::uint32_t threads = 0;
    bool write_traces = true;
    std::string out_dir;

    ComparePlan() {
        objective.kind = config::ObjectiveSpec::Kind::surrogate;
        objective.direction = Direction::minimize;
        objective.samples = 5;
    }

    void validate() const {
        if (algorithms.empty()) throw ParameterError("no algorithms to run");
        if (runs < 1) throw ParameterError("runs must be >= 1");
        if (objective.kind == config::ObjectiveSpec::Kind::nk)
            throw ParameterError("compare needs a real-valued objective");
        variation.validate();
    }
};

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct RunResult {
    std::uint32_t n = 0, k = 0;
    std::uint32_t landscape_index = 0, run_index = 0;
    Algorithm algorithm = Algorithm::baseline;
    double final_best = 0.0; // internal fitness
    double final_mean = 0.0;
    std::uint64_t evaluations = 0;
    std::uint64_t samples = 0;
    bool best_monotone = true;
    std::string trace_path;
};

struct ComparisonReport {
    struct AlgSummary {
        Algorithm algorithm = Algorithm::baseline;
        std::size_t runs = 0;
        double mean_final_best = 0.0, min_final_best = 0.0, max_final_best = 0.0,
               sd_final_best = 0.0;
        double mean_final_mean = 0.0;
        double mean_evaluations = 0.0;
    };
    struct Cell {
        std::uint32_t n = 0, k = 0;
        bool complete = true;
        std::vector<AlgSummary> algorithms;
    };
    struct SignificanceRow {
        std::string setting;
        std::string comparison;
        std::string test;
        double statistic = 0.0;
        double p_value = 1.0;
    };
    struct CurveExport {
        Algorithm algorithm;
        std::string which; // "best" or "mean"
        stats::ConfidenceBand band; // raw objective orientation
    };
    struct BestParams {
        Algorithm algorithm;
        std::uint32_t run_index;
        std::vector<double> values;
        double raw_fitness;
    };
    struct SampleRow {
        Algorithm algorithm;
        std::uint32_t run_index;
        std::uint64_t evaluation_index;
        std::uint32_t sample_index;
        double raw_value;
    };

    std::vector<Cell> cells;
    std::vector<SignificanceRow> significance;
    std::vector<RunResult> runs;
    std::vector<CurveExport> curves;      // compare only
    std::vector<BestParams> best_params;  // compare only
    std::vector<std::string> dim_names;   // compare only
    std::vector<SampleRow> samples;       // compare only
    std::vector<std::string> errors;
    nlohmann::json plan_json;

    bool budget_parity() const {
        std::uint64_t expect = 0;
        bool first = true;
        for (const auto& r : runs) {
            if (first) {
                expect = r.evaluations;
                first = false;
            } else if (r.evaluations != expect) {
                return false;
            }
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Internals
// ---------------------------------------------------------------------------

// Per-run trace file. A stride > 1 thins the rows but always keeps the first
// and last generation.
template <class G>
void write_trace_csv(const fs::path& path, const RunTrace<G>& trace, std::uint32_t stride = 1) {
    csv::Writer w(path);
    w.raw_row("generation,best,mean,offspring");
    const auto& recs = trace.records;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (stride > 1 && i != 0 && i + 1 != recs.size() && i % stride != 0) continue;
        w.row({std::to_string(recs[i].generation), csv::format_double(recs[i].best),
               csv::format_double(recs[i].mean), csv::format_double(recs[i].offspring)});
    }
}

namespace detail {

inline void parallel_for(std::size_t count, std::uint32_t threads,
                         const std::function<void(std::size_t)>& body) {
    std::uint32_t nthreads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<std::uint32_t>(std::min<std::size_t>(nthreads, count));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::uint32_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

template <class G>
bool best_is_monotone(const RunTrace<G>& trace) {
    for (std::size_t i = 1; i < trace.records.size(); ++i)
        if (trace.records[i].best < trace.records[i - 1].best) return false;
    return true;
}

inline ComparisonReport::AlgSummary summarize_finals(Algorithm alg,
                                                     const std::vector<const RunResult*>& rs) {
    ComparisonReport::AlgSummary s;
    s.algorithm = alg;
    s.runs = rs.size();
    if (rs.empty()) return s;
    std::vector<double> finals;
    finals.reserve(rs.size());
    double mean_sum = 0.0, eval_sum = 0.0;
    for (const auto* r : rs) {
        finals.push_back(r->final_best);
        mean_sum += r->final_mean;
        eval_sum += static_cast<double>(r->evaluations);
    }
    const auto sum = stats::summarize(finals);
    s.mean_final_best = sum.mean;
    s.min_final_best = sum.min;
    s.max_final_best = sum.max;
    s.sd_final_best = finals.size() >= 2 ? sum.sd : 0.0;
    s.mean_final_mean = mean_sum / static_cast<double>(rs.size());
    s.mean_evaluations = eval_sum / static_cast<double>(rs.size());
    return s;
}

inline std::shared_ptr<Sampler<RealGenome>> make_real_sampler(const config::ObjectiveSpec& spec,
                                                              const SearchSpace& space) {
    switch (spec.kind) {
    case config::ObjectiveSpec::Kind::surrogate: {
        SurrogateParams params = spec.surrogate;
        params.bounds = space.bounds();
        params.validate();
        return std::make_shared<SurrogateSampler>(params);
    }
    case config::ObjectiveSpec::Kind::external: {
        ExternalConfig cfg;
        cfg.command = spec.command;
        cfg.dimension = space.size();
        cfg.timeout = spec.timeout;
        return std::make_shared<ExternalSampler>(std::move(cfg));
    }
    case config::ObjectiveSpec::Kind::nk: break;
    }
    throw ParameterError("objective kind not usable with a real genome");
}

} // namespace detail

// ---------------------------------------------------------------------------
// NK sweep
// ---------------------------------------------------------------------------

inline nlohmann::json nk_plan_to_json(const NkSweepPlan& plan) {
    nlohmann::json j;
    j["kind"] = "nk-sweep";
    j["n_values"] = plan.n_values;
    j["k_values"] = plan.k_values;
    std::vector<std::string> algs;
    for (auto a : plan.algorithms) algs.push_back(to_string(a));
    j["algorithms"] = algs;
    j["landscapes_per_setting"] = plan.landscapes_per_setting;
    j["runs_per_landscape"] = plan.runs_per_landscape;
    j["population_size"] = plan.population_size;
    j["tournament_size"] = plan.tournament_size;
    j["budget"] = plan.budget;
    j["variation"] = config::variation_to_json(plan.variation);
    j["base_seed"] = plan.base_seed;
    j["trace_stride"] = plan.trace_stride;
    j["write_traces"] = plan.write_traces;
    return j;
}

inline NkSweepPlan nk_plan_from_json(const nlohmann::json& j) {
    NkSweepPlan plan;
    plan.variation.crossover_kind = CrossoverKind::one_point;
    plan.variation.crossover_rate = 1.0;
    plan.variation.mutation_kind = MutationKind::single_bit_flip;
    if (j.contains("n_values")) plan.n_values = j.at("n_values").get<std::vector<std::uint32_t>>();
    if (j.contains("k_values")) plan.k_values = j.at("k_values").get<std::vector<std::uint32_t>>();
    if (j.contains("algorithms")) {
        plan.algorithms.clear();
        for (const auto& s : j.at("algorithms"))
            plan.algorithms.push_back(config::algorithm_from_string(s.get<std::string>()));
    }
    if (j.contains("landscapes_per_setting"))
        plan.landscapes_per_setting = j.at("landscapes_per_setting").get<std::uint32_t>();
    if (j.contains("runs_per_landscape"))
        plan.runs_per_landscape = j.at("runs_per_landscape").get<std::uint32_t>();
    if (j.contains("population_size"))
        plan.population_size = j.at("population_size").get<std::uint32_t>();
    if (j.contains("tournament_size"))
        plan.tournament_size = j.at("tournament_size").get<std::uint32_t>();
    if (j.contains("budget")) plan.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("variation")) plan.variation = config::variation_from_json(j.at("variation"));
    if (j.contains("base_seed")) plan.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("threads")) plan.threads = j.at("threads").get<std::uint32_t>();
    if (j.contains("trace_stride")) plan.trace_stride = j.at("trace_stride").get<std::uint32_t>();
    if (j.contains("write_traces")) plan.write_traces = j.at("write_traces").get<bool>();
    plan.validate();
    return plan;
}

inline ComparisonReport run_nk_sweep(const NkSweepPlan& plan) {
    plan.validate();
    const bool writing = plan.write_traces && !plan.out_dir.empty();
    if (!plan.out_dir.empty()) fs::create_directories(plan.out_dir);

    struct Task {
        std::uint32_t n, k, li, ri;
        Algorithm alg;
        const nk::Landscape* landscape;
    };

    // Landscapes are generated up front, once per (setting, index).
    std::vector<std::unique_ptr<nk::Landscape>> landscapes;
    std::vector<Task> tasks;
    for (auto n : plan.n_values) {
        for (auto k : plan.k_values) {
            for (std::uint32_t li = 0; li < plan.landscapes_per_setting; ++li) {
                const auto seed = derive_seed(plan.base_seed, {kTagLandscape, n, k, li});
                landscapes.push_back(std::make_unique<nk::Landscape>(nk::generate(n, k, seed)));
                const nk::Landscape* land = landscapes.back().get();
                for (std::uint32_t ri = 0; ri < plan.runs_per_landscape; ++ri)
                    for (auto alg : plan.algorithms)
                        tasks.push_back({n, k, li, ri, alg, land});
            }
        }
    }

    std::vector<RunResult> results(tasks.size());
    std::vector<std::string> task_errors(tasks.size());
    detail::parallel_for(tasks.size(), plan.threads, [&](std::size_t ti) {
        const Task& t = tasks[ti];
        try {
            EAConfig cfg;
            cfg.algorithm = t.alg;
            cfg.population_size = plan.population_size;
            cfg.tournament_size = plan.tournament_size;
            cfg.budget = plan.budget;
            cfg.variation = plan.variation;
            cfg.run_seed =
                derive_seed(plan.base_seed, {kTagRun, t.n, t.k, t.li, t.ri, algorithm_id(t.alg)});
            cfg.init_seed = derive_seed(plan.base_seed, {kTagInit, t.n, t.k, t.li, t.ri});

            Objective<BitGenome> objective(std::make_shared<NkSampler>(*t.landscape),
                                           Direction::maximize, 1, cfg.run_seed);
            const auto trace = run_from_spec(cfg, objective, static_cast<std::size_t>(t.n));

            RunResult r;
            r.n = t.n;
            r.k = t.k;
            r.landscape_index = t.li;
            r.run_index = t.ri;
            r.algorithm = t.alg;
            r.final_best = trace.final_best();
            r.final_mean = trace.final_mean();
            r.evaluations = trace.total_evaluations;
            r.samples = trace.total_samples;
            r.best_monotone = detail::best_is_monotone(trace);
            if (writing) {
                const auto name = "trace_n" + std::to_string(t.n) + "_k" + std::to_string(t.k) +
                                  "_l" + std::to_string(t.li) + "_r" + std::to_string(t.ri) +
                                  "_" + to_string(t.alg) + ".csv";
                write_trace_csv(fs::path(plan.out_dir) / name, trace, plan.trace_stride);
                r.trace_path = name;
            }
            results[ti] = std::move(r);
        } catch (const std::exception& e) {
            task_errors[ti] = std::string("n=") + std::to_string(t.n) +
                              " k=" + std::to_string(t.k) + " l=" + std::to_string(t.li) +
                              " r=" + std::to_string(t.ri) + " " + to_string(t.alg) + ": " +
                              e.what();
        }
    });

    ComparisonReport report;
    report.plan_json = nk_plan_to_json(plan);
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        if (!task_errors[ti].empty())
            report.errors.push_back(task_errors[ti]);
        else
            report.runs.push_back(results[ti]);
    }

    for (auto n : plan.n_values) {
        for (auto k : plan.k_values) {
            ComparisonReport::Cell cell;
            cell.n = n;
            cell.k = k;
            const std::size_t expected = static_cast<std::size_t>(plan.landscapes_per_setting) *
                                         plan.runs_per_landscape;
            std::vector<std::vector<double>> finals_by_alg(plan.algorithms.size());
            std::vector<std::vector<double>> landscape_means_by_alg(plan.algorithms.size());
            for (std::size_t ai = 0; ai < plan.algorithms.size(); ++ai) {
                const Algorithm alg = plan.algorithms[ai];
                std::vector<const RunResult*> rs;
                for (const auto& r : report.runs)
                    if (r.n == n && r.k == k && r.algorithm == alg) rs.push_back(&r);
                cell.complete = cell.complete && rs.size() == expected;
                cell.algorithms.push_back(detail::summarize_finals(alg, rs));
                for (const auto* r : rs) finals_by_alg[ai].push_back(r->final_best);
                // landscape blocks for the paired analysis
                auto& lm = landscape_means_by_alg[ai];
                lm.assign(plan.landscapes_per_setting, 0.0);
                std::vector<std::size_t> counts(plan.landscapes_per_setting, 0);
                for (const auto* r : rs) {
                    lm[r->landscape_index] += r->final_best;
                    ++counts[r->landscape_index];
                }
                for (std::size_t li = 0; li < lm.size(); ++li)
                    if (counts[li]) lm[li] /= static_cast<double>(counts[li]);
            }
            const std::string setting = "n" + std::to_string(n) + "_k" + std::to_string(k);
            // Every non-baseline algorithm is tested against the first algorithm.
            for (std::size_t ai = 1; ai < plan.algorithms.size(); ++ai) {
                if (finals_by_alg[ai].size() < 2 || finals_by_alg[0].size() < 2) continue;
                const std::string comparison =
                    to_string(plan.algorithms[ai]) + "-vs-" + to_string(plan.algorithms[0]);
                const auto welch = stats::welch_t_test(finals_by_alg[ai], finals_by_alg[0]);
                report.significance.push_back(
                    {setting, comparison, "welch-pooled", welch.statistic, welch.p_value});
                if (plan.landscapes_per_setting >= 2) {
                    const auto wil = stats::wilcoxon_signed_rank(landscape_means_by_alg[ai],
                                                                 landscape_means_by_alg[0]);
                    report.significance.push_back({setting, comparison,
                                                   "wilcoxon-landscape-paired", wil.statistic,
                                                   wil.p_value});
                }
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Budgeted real-valued comparison
// ---------------------------------------------------------------------------

inline nlohmann::json compare_plan_to_json(const ComparePlan& plan) {
    nlohmann::json j;
    j["kind"] = "compare";
    std::vector<std::string> algs;
    for (auto a : plan.algorithms) algs.push_back(to_string(a));
    j["algorithms"] = algs;
    j["runs"] = plan.runs;
    j["population_size"] = plan.population_size;
    j["tournament_size"] = plan.tournament_size;
    j["budget"] = plan.budget;
    j["samples"] = plan.samples;
    j["replacement"] = to_string(plan.replacement);
    j["variation"] = config::variation_to_json(plan.variation);
    j["space"] = config::space_to_json(plan.space);
    j["objective"] = config::objective_to_json(plan.objective);
    j["base_seed"] = plan.base_seed;
    j["write_traces"] = plan.write_traces;
    return j;
}

inline ComparePlan compare_plan_from_json(const nlohmann::json& j) {
    ComparePlan plan;
    if (j.contains("algorithms")) {
        plan.algorithms.clear();
        for (const auto& s : j.at("algorithms"))
            plan.algorithms.push_back(config::algorithm_from_string(s.get<std::string>()));
    }
    if (j.contains("runs")) plan.runs = j.at("runs").get<std::uint32_t>();
    if (j.contains("population_size"))
        plan.population_size = j.at("population_size").get<std::uint32_t>();
    if (j.contains("tournament_size"))
        plan.tournament_size = j.at("tournament_size").get<std::uint32_t>();
    if (j.contains("budget")) plan.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("samples")) plan.samples = j.at("samples").get<std::uint32_t>();
    if (j.contains("replacement"))
        plan.replacement = config::replacement_from_string(j.at("replacement"));
    if (j.contains("variation")) plan.variation = config::variation_from_json(j.at("variation"));
    if (j.contains("space")) plan.space = config::space_from_json(j.at("space"));
    if (j.contains("objective")) plan.objective = config::objective_from_json(j.at("objective"));
    if (j.contains("base_seed")) plan.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("threads")) plan.threads = j.at("threads").get<std::uint32_t>();
    if (j.contains("write_traces")) plan.write_traces = j.at("write_traces").get<bool>();
    plan.objective.samples = plan.samples;
    plan.validate();
    return plan;
}

inline ComparisonReport run_budgeted_compare(const ComparePlan& plan) {
    plan.validate();
    const bool writing = plan.write_traces && !plan.out_dir.empty();
    if (!plan.out_dir.empty()) fs::create_directories(plan.out_dir);
    const auto bounds = plan.space.bounds();

    struct PerRun {
        std::vector<RunResult> by_alg;
        std::vector<std::vector<double>> best_curves;  // internal fitness
        std::vector<std::vector<double>> mean_curves;
        std::vector<ComparisonReport::BestParams> best_params;
        std::vector<std::vector<ComparisonReport::SampleRow>> samples;
        std::string error;
    };
    std::vector<PerRun> per_run(plan.runs);

    detail::parallel_for(plan.runs, plan.threads, [&](std::size_t ri_s) {
        const auto ri = static_cast<std::uint32_t>(ri_s);
        PerRun& slot = per_run[ri];
        try {
            // Shared, evaluated-once initial population for this run index.
            const auto init_obj_seed =
                derive_seed(plan.base_seed, {kTagObjective, ri, kInitEvalId});
            Objective<RealGenome> init_objective(detail::make_real_sampler(plan.objective,
                                                                           plan.space),
                                                 plan.objective.direction, plan.samples,
                                                 init_obj_seed);
            const auto init_seed = derive_seed(plan.base_seed, {kTagInit, ri});
            const auto initial_population = make_initial_population<RealGenome>(
                plan.population_size, bounds, init_seed, init_objective);

            for (auto alg : plan.algorithms) {
                EAConfig cfg;
                cfg.algorithm = alg;
                cfg.population_size = plan.population_size;
                cfg.tournament_size = plan.tournament_size;
                cfg.budget = plan.budget;
                cfg.replacement = plan.replacement;
                cfg.variation = plan.variation;
                cfg.run_seed = derive_seed(plan.base_seed, {kTagRun, ri, algorithm_id(alg)});

                const auto obj_seed =
                    derive_seed(plan.base_seed, {kTagObjective, ri, algorithm_id(alg)});
                Objective<RealGenome> objective(detail::make_real_sampler(plan.objective,
                                                                          plan.space),
                                                plan.objective.direction, plan.samples, obj_seed,
                                                /*keep_records=*/true);
                auto trace = run(cfg, objective, initial_population);

                RunResult r;
                r.run_index = ri;
                r.algorithm = alg;
                r.final_best = trace.final_best();
                r.final_mean = trace.final_mean();
                r.evaluations = trace.total_evaluations;
                r.samples = trace.total_samples;
                r.best_monotone = detail::best_is_monotone(trace);
                if (writing) {
                    const auto name = "trace_run" + std::to_string(ri) + "_" + to_string(alg) +
                                      ".csv";
                    write_trace_csv(fs::path(plan.out_dir) / name, trace, 1);
                    r.trace_path = name;
                }
                slot.by_alg.push_back(std::move(r));

                std::vector<double> bc, mc;
                for (const auto& rec : trace.records) {
                    bc.push_back(rec.best);
                    mc.push_back(rec.mean);
                }
                slot.best_curves.push_back(std::move(bc));
                slot.mean_curves.push_back(std::move(mc));

                const auto& best = trace.best_individual();
                slot.best_params.push_back(
                    {alg, ri, best.genome.values,
                     objective.raw_from_internal(best.fitness)});

                std::vector<ComparisonReport::SampleRow> sample_rows;
                for (const auto& rec : objective.records())
                    for (std::size_t si = 0; si < rec.samples.size(); ++si)
                        sample_rows.push_back({alg, ri, rec.index,
                                               static_cast<std::uint32_t>(si), rec.samples[si]});
                slot.samples.push_back(std::move(sample_rows));
            }
        } catch (const std::exception& e) {
            slot.error = "run " + std::to_string(ri) + ": " + e.what();
            slot.by_alg.clear();
        }
    });

    ComparisonReport report;
    report.plan_json = compare_plan_to_json(plan);
    for (const auto& d : plan.space.dims) report.dim_names.push_back(d.name);

    const bool minimizing = plan.objective.direction == Direction::minimize;
    const auto to_raw = [&](double internal) { return minimizing ? -internal : internal; };

    std::vector<std::vector<double>> finals_best(plan.algorithms.size());
    std::vector<std::vector<double>> finals_mean(plan.algorithms.size());
    std::vector<std::vector<std::vector<double>>> best_curves(plan.algorithms.size());
    std::vector<std::vector<std::vector<double>>> mean_curves(plan.algorithms.size());

    for (const auto& slot : per_run) {
        if (!slot.error.empty()) {
            report.errors.push_back(slot.error);
            continue;
        }
        for (std::size_t ai = 0; ai < plan.algorithms.size(); ++ai) {
            report.runs.push_back(slot.by_alg[ai]);
            finals_best[ai].push_back(slot.by_alg[ai].final_best);
            finals_mean[ai].push_back(slot.by_alg[ai].final_mean);
            // curves exported in raw orientation
            auto bc = slot.best_curves[ai];
            auto mc = slot.mean_curves[ai];
            for (auto& v : bc) v = to_raw(v);
            for (auto& v : mc) v = to_raw(v);
            best_curves[ai].push_back(std::move(bc));
            mean_curves[ai].push_back(std::move(mc));
            report.best_params.push_back(slot.best_params[ai]);
            for (const auto& row : slot.samples[ai]) report.samples.push_back(row);
        }
    }

    ComparisonReport::Cell cell;
    cell.n = 0;
    cell.k = 0;
    for (std::size_t ai = 0; ai < plan.algorithms.size(); ++ai) {
        std::vector<const RunResult*> rs;
        for (const auto& r : report.runs)
            if (r.algorithm == plan.algorithms[ai]) rs.push_back(&r);
        cell.complete = cell.complete && rs.size() == plan.runs;
        cell.algorithms.push_back(detail::summarize_finals(plan.algorithms[ai], rs));
    }
    report.cells.push_back(std::move(cell));

    for (std::size_t ai = 1; ai < plan.algorithms.size(); ++ai) {
        if (finals_best[ai].size() < 1) continue;
        const std::string comparison =
            to_string(plan.algorithms[ai]) + "-vs-" + to_string(plan.algorithms[0]);
        const auto wb = stats::wilcoxon_signed_rank(finals_best[ai], finals_best[0]);
        report.significance.push_back({"compare", comparison, "wilcoxon-final-best",
                                       wb.statistic, wb.p_value});
        const auto wm = stats::wilcoxon_signed_rank(finals_mean[ai], finals_mean[0]);
        report.significance.push_back({"compare", comparison, "wilcoxon-final-mean",
                                       wm.statistic, wm.p_value});
    }

    for (std::size_t ai = 0; ai < plan.algorithms.size(); ++ai) {
        if (best_curves[ai].size() >= 2) {
            report.curves.push_back({plan.algorithms[ai], "best",
                                     stats::confidence_band(best_curves[ai])});
            report.curves.push_back({plan.algorithms[ai], "mean",
                                     stats::confidence_band(mean_curves[ai])});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

// Deterministic file set for a report; re-export produces identical bytes.
// Files: summary.csv, significance.csv, runs.csv, config.json, and for
// compare reports curve_{which}_{alg}.csv, params_best_{alg}.csv,
// samples_{alg}.csv. Per-run trace CSVs are streamed during the sweep itself.
inline void export_report(const ComparisonReport& report, const fs::path& dir) {
    fs::create_directories(dir);

    {
        csv::Writer w(dir / "summary.csv");
        w.raw_row("n,k,algorithm,runs,mean_final_best,min_final_best,max_final_best,"
                  "sd_final_best,mean_final_mean,mean_evaluations,complete");
        for (const auto& cell : report.cells)
            for (const auto& a : cell.algorithms)
                w.row({std::to_string(cell.n), std::to_string(cell.k), to_string(a.algorithm),
                       std::to_string(a.runs), csv::format_double(a.mean_final_best),
                       csv::format_double(a.min_final_best), csv::format_double(a.max_final_best),
                       csv::format_double(a.sd_final_best), csv::format_double(a.mean_final_mean),
                       csv::format_double(a.mean_evaluations), cell.complete ? "1" : "0"});
    }
    {
        csv::Writer w(dir / "significance.csv");
        w.raw_row("setting,comparison,test,statistic,p_value");
        for (const auto& s : report.significance)
            w.row({s.setting, s.comparison, s.test, csv::format_double(s.statistic),
                   csv::format_double(s.p_value)});
    }
    {
        csv::Writer w(dir / "runs.csv");
        w.raw_row("n,k,landscape,run,algorithm,final_best,final_mean,evaluations,samples,"
                  "best_monotone,trace");
        for (const auto& r : report.runs)
            w.row({std::to_string(r.n), std::to_string(r.k), std::to_string(r.landscape_index),
                   std::to_string(r.run_index), to_string(r.algorithm),
                   csv::format_double(r.final_best), csv::format_double(r.final_mean),
                   std::to_string(r.evaluations), std::to_string(r.samples),
                   r.best_monotone ? "1" : "0", r.trace_path});
    }
    for (const auto& curve : report.curves) {
        csv::Writer w(dir / ("curve_" + curve.which + "_" + to_string(curve.algorithm) + ".csv"));
        w.raw_row("step,mean,lower,upper");
        for (std::size_t i = 0; i < curve.band.mean.size(); ++i)
            w.row({std::to_string(i), csv::format_double(curve.band.mean[i]),
                   csv::format_double(curve.band.lower[i]),
                   csv::format_double(curve.band.upper[i])});
    }
    if (!report.best_params.empty()) {
        std::vector<Algorithm> algs;
        for (const auto& bp : report.best_params)
            if (std::find(algs.begin(), algs.end(), bp.algorithm) == algs.end())
                algs.push_back(bp.algorithm);
        for (auto alg : algs) {
            csv::Writer w(dir / ("params_best_" + to_string(alg) + ".csv"));
            std::string header = "run";
            for (const auto& name : report.dim_names) header += "," + name;
            header += ",raw_fitness";
            w.raw_row(header);
            for (const auto& bp : report.best_params) {
                if (bp.algorithm != alg) continue;
                std::vector<std::string> cells{std::to_string(bp.run_index)};
                for (double v : bp.values) cells.push_back(csv::format_double(v));
                cells.push_back(csv::format_double(bp.raw_fitness));
                w.row(cells);
            }
        }
    }
    if (!report.samples.empty()) {
        std::vector<Algorithm> algs;
        for (const auto& s : report.samples)
            if (std::find(algs.begin(), algs.end(), s.algorithm) == algs.end())
                algs.push_back(s.algorithm);
        for (auto alg : algs) {
            csv::Writer w(dir / ("samples_" + to_string(alg) + ".csv"));
            w.raw_row("run,evaluation,sample,raw_value");
            for (const auto& s : report.samples) {
                if (s.algorithm != alg) continue;
                w.row({std::to_string(s.run_index), std::to_string(s.evaluation_index),
                       std::to_string(s.sample_index), csv::format_double(s.raw_value)});
            }
        }
    }
    if (!report.errors.empty()) {
        csv::Writer w(dir / "errors.csv");
        w.raw_row("error");
        for (const auto& e : report.errors) {
            std::string cleaned = e;
            for (auto& c : cleaned)
                if (c == ',' || c == '\n') c = ';';
            w.row({cleaned});
        }
    }
    {
        std::ofstream out(dir / "config.json", std::ios::binary);
        out << report.plan_json.dump(2) << "\n";
    }
}

} // namespace hdea::harness
