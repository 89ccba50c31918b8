#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdea/error.hpp"
#include "hdea/genome.hpp"
#include "hdea/objective.hpp"
#include "hdea/rng.hpp"

// Steady-state evolutionary loops: the baseline EA, the haploid-diploid EA,
// and the 2P-pool control. All three create one offspring per step, evaluate
// it exactly once through the objective wrapper, and insert it through the
// configured replacement policy (unconditional replace-worst by default, or
// an elitist replacement tournament). Either way the current best individual
// survives, so best-in-population fitness never decreases, and the three
// algorithms consume identical evaluation budgets.
//
// Reproducibility contract: a step is a pure function of (population, config,
// objective, RNG state). The RNG draw order is part of the contract — traces
// are bit-identical for a fixed seed. Baseline step draws, in order:
//   tournament 1, tournament 2 (redrawn whole while it returns parent 1),
//   crossover gate, crossover draws (if the gate passed), child coin,
//   mutation draws, worst-tie draw (only on ties).
// The HDEA step draws: P diploid-partner indices, diploid tournaments 1 and 2
// (redraw rule as above), meiosis of parent 1, gamete pick 1, meiosis of
// parent 2, gamete pick 2, final gamete coin, mutation draws, worst-tie draw.
// The 2P-control step draws: P pool-partner indices, then as the baseline.
// Tournaments draw T member indices and break fitness ties uniformly among
// the distinct tied candidates (one extra draw, only on a tie). Under
// tournament replacement the worst-tie draw is replaced by T victim indices
// plus the tie draw.

namespace hdea {

enum class Algorithm { baseline, hdea, control_2p };

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::baseline: return "baseline";
    case Algorithm::hdea: return "hdea";
    case Algorithm::control_2p: return "control-2p";
    }
    return "?";
}

// How the offspring enters the population. replace_worst evicts the current
// worst member unconditionally. tournament evicts the worst of T members
// drawn from the population excluding one copy of the current best, so the
// best individual always survives and best-fitness stays monotone.
enum class ReplacementKind { replace_worst, tournament };

inline std::string to_string(ReplacementKind r) {
    return r == ReplacementKind::replace_worst ? "replace-worst" : "tournament";
}

struct EAConfig {
    Algorithm algorithm = Algorithm::baseline;
    std::uint32_t population_size = 30; // P
    std::uint32_t tournament_size = 2;  // T (selection and, when enabled, replacement)
    std::uint64_t budget = 20'000;      // offspring created (steady-state generations)
    ReplacementKind replacement = ReplacementKind::replace_worst;
    VariationConfig variation;
    std::uint64_t run_seed = 1;
    std::optional<std::uint64_t> init_seed; // population init stream; derived from run_seed if unset

    void validate() const {
        if (population_size < 2) throw ParameterError("population_size must be >= 2");
        if (tournament_size < 2) throw ParameterError("tournament_size must be >= 2");
        variation.validate();
    }
};

struct GenerationRecord {
    std::uint64_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double offspring = std::numeric_limits<double>::quiet_NaN(); // NaN for the initial record
};

template <class G>
struct RunTrace {
    std::vector<GenerationRecord> records;
    std::vector<Individual<G>> final_population;
    std::uint64_t total_evaluations = 0; // objective evaluate() calls made by the run
    std::uint64_t total_samples = 0;

    double final_best() const { return records.back().best; }
    double final_mean() const { return records.back().mean; }

    const Individual<G>& best_individual() const {
        const Individual<G>* best = &final_population.front();
        for (const auto& ind : final_population)
            if (ind.fitness > best->fitness) best = &ind;
        return *best;
    }
};

namespace detail {

// Best of T uniformly drawn members (with replacement); fitness ties among
// the drawn candidates break uniformly over the distinct tied indices.
template <class FitnessOf>
std::size_t tournament(std::size_t pool_size, std::uint32_t t, FitnessOf&& fitness, Rng& rng) {
    std::vector<std::size_t> drawn(t);
    for (auto& d : drawn) d = static_cast<std::size_t>(rng.uniform_index(pool_size));
    double best = -std::numeric_limits<double>::infinity();
    for (auto d : drawn) best = std::max(best, fitness(d));
    std::vector<std::size_t> tied;
    for (auto d : drawn) {
        if (fitness(d) == best && std::find(tied.begin(), tied.end(), d) == tied.end())
            tied.push_back(d);
    }
    if (tied.size() == 1) return tied.front();
    return tied[static_cast<std::size_t>(rng.uniform_index(tied.size()))];
}

// Second tournament winner forced distinct from the first by index.
template <class FitnessOf>
std::size_t tournament_excluding(std::size_t pool_size, std::uint32_t t, FitnessOf&& fitness,
                                 std::size_t excluded, Rng& rng) {
    for (;;) {
        const std::size_t winner = tournament(pool_size, t, fitness, rng);
        if (winner != excluded) return winner;
    }
}

template <class G>
std::size_t worst_index(const std::vector<Individual<G>>& pop, Rng& rng) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& ind : pop) worst = std::min(worst, ind.fitness);
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (pop[i].fitness == worst) tied.push_back(i);
    if (tied.size() == 1) return tied.front();
    return tied[static_cast<std::size_t>(rng.uniform_index(tied.size()))];
}

// Replacement-tournament eviction: one copy of the current best (first index
// holding the maximum) is shielded; T draws come from the rest and the worst
// drawn is evicted, ties uniform. Draw order: T victim indices, then the tie
// draw (only on a tie).
template <class G>
std::size_t choose_victim(const std::vector<Individual<G>>& pop, const EAConfig& cfg, Rng& rng) {
    if (cfg.replacement == ReplacementKind::replace_worst) return worst_index(pop, rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (pop[i].fitness > pop[best].fitness) best = i;
    std::vector<std::size_t> drawn(cfg.tournament_size);
    for (auto& d : drawn)
        d = static_cast<std::size_t>(rng.uniform_index_excluding(pop.size(), best));
    double worst = std::numeric_limits<double>::infinity();
    for (auto d : drawn) worst = std::min(worst, pop[d].fitness);
    std::vector<std::size_t> tied;
    for (auto d : drawn)
        if (pop[d].fitness == worst && std::find(tied.begin(), tied.end(), d) == tied.end())
            tied.push_back(d);
    if (tied.size() == 1) return tied.front();
    return tied[static_cast<std::size_t>(rng.uniform_index(tied.size()))];
}

// Crossover gate + child coin + mutation: shared tail of all three steps.
template <class G>
G make_offspring(const G& parent_a, const G& parent_b, const VariationConfig& variation,
                 Rng& rng) {
    std::pair<G, G> children;
    if (rng.bernoulli(variation.crossover_rate))
        children = apply_crossover(parent_a, parent_b, variation, rng);
    else
        children = {parent_a, parent_b};
    G& kept = rng.uniform_index(2) == 0 ? children.first : children.second;
    return apply_mutation(kept, variation, rng);
}

template <class G>
GenerationRecord record_state(std::uint64_t generation, const std::vector<Individual<G>>& pop,
                              double offspring_fitness) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.offspring = offspring_fitness;
    double best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& ind : pop) {
        best = std::max(best, ind.fitness);
        sum += ind.fitness;
    }
    rec.best = best;
    rec.mean = sum / static_cast<double>(pop.size());
    return rec;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Diploid / 2P pool construction (consumes no objective evaluations)
// ---------------------------------------------------------------------------

// One diploid per member: first = the member itself, second = a partner drawn
// uniformly from the other P-1 members; combined fitness is the exact mean.
template <class G>
std::vector<Diploid<G>> build_diploid_pool(const std::vector<Individual<G>>& pop, Rng& rng) {
    if (pop.size() < 2) throw ParameterError("diploid pool needs a population of >= 2");
    std::vector<Diploid<G>> pool;
    pool.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto partner =
            static_cast<std::size_t>(rng.uniform_index_excluding(pop.size(), i));
        pool.push_back(make_diploid(pop[i], pop[partner]));
    }
    return pool;
}

// Haploid mirror of the diploid pool: [member 0, partner of 0, member 1, ...],
// size 2P, fitnesses untouched.
template <class G>
std::vector<Individual<G>> build_2p_pool(const std::vector<Individual<G>>& pop, Rng& rng) {
    if (pop.size() < 2) throw ParameterError("2P pool needs a population of >= 2");
    std::vector<Individual<G>> pool;
    pool.reserve(2 * pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto partner =
            static_cast<std::size_t>(rng.uniform_index_excluding(pop.size(), i));
        pool.push_back(pop[i]);
        pool.push_back(pop[partner]);
    }
    return pool;
}

// ---------------------------------------------------------------------------
// Steps
// ---------------------------------------------------------------------------

template <class G>
GenerationRecord ea_step(std::vector<Individual<G>>& pop, const EAConfig& cfg,
                         Objective<G>& objective, Rng& rng, std::uint64_t generation) {
    const auto fit = [&](std::size_t i) { return pop[i].fitness; };
    const std::size_t p1 = detail::tournament(pop.size(), cfg.tournament_size, fit, rng);
    const std::size_t p2 =
        detail::tournament_excluding(pop.size(), cfg.tournament_size, fit, p1, rng);

    G child = detail::make_offspring(pop[p1].genome, pop[p2].genome, cfg.variation, rng);
    const double fitness = objective.evaluate(child);
    const std::size_t victim = detail::choose_victim(pop, cfg, rng);
    pop[victim] = Individual<G>{std::move(child), fitness, objective.samples_per_evaluation()};
    return detail::record_state(generation, pop, fitness);
}

template <class G>
GenerationRecord hdea_step(std::vector<Individual<G>>& pop, const EAConfig& cfg,
                           Objective<G>& objective, Rng& rng, std::uint64_t generation) {
    const auto pool = build_diploid_pool(pop, rng);
    const auto fit = [&](std::size_t i) { return pool[i].combined_fitness; };
    const std::size_t d1 = detail::tournament(pool.size(), cfg.tournament_size, fit, rng);
    const std::size_t d2 =
        detail::tournament_excluding(pool.size(), cfg.tournament_size, fit, d1, rng);

    const auto gametes1 = meiosis(pool[d1], cfg.variation, rng);
    const G& gamete1 = gametes1[rng.uniform_index(4)];
    const auto gametes2 = meiosis(pool[d2], cfg.variation, rng);
    const G& gamete2 = gametes2[rng.uniform_index(4)];
    const G& chosen = rng.uniform_index(2) == 0 ? gamete1 : gamete2;

    G child = apply_mutation(chosen, cfg.variation, rng);
    const double fitness = objective.evaluate(child);
    const std::size_t victim = detail::choose_victim(pop, cfg, rng);
    pop[victim] = Individual<G>{std::move(child), fitness, objective.samples_per_evaluation()};
    return detail::record_state(generation, pop, fitness);
}

template <class G>
GenerationRecord control_2p_step(std::vector<Individual<G>>& pop, const EAConfig& cfg,
                                 Objective<G>& objective, Rng& rng, std::uint64_t generation) {
    const auto pool = build_2p_pool(pop, rng);
    const auto fit = [&](std::size_t i) { return pool[i].fitness; };
    const std::size_t p1 = detail::tournament(pool.size(), cfg.tournament_size, fit, rng);
    const std::size_t p2 =
        detail::tournament_excluding(pool.size(), cfg.tournament_size, fit, p1, rng);

    G child = detail::make_offspring(pool[p1].genome, pool[p2].genome, cfg.variation, rng);
    const double fitness = objective.evaluate(child);
    const std::size_t victim = detail::choose_victim(pop, cfg, rng);
    pop[victim] = Individual<G>{std::move(child), fitness, objective.samples_per_evaluation()};
    return detail::record_state(generation, pop, fitness);
}

template <class G>
GenerationRecord step(std::vector<Individual<G>>& pop, const EAConfig& cfg,
                      Objective<G>& objective, Rng& rng, std::uint64_t generation) {
    switch (cfg.algorithm) {
    case Algorithm::baseline: return ea_step(pop, cfg, objective, rng, generation);
    case Algorithm::hdea: return hdea_step(pop, cfg, objective, rng, generation);
    case Algorithm::control_2p: return control_2p_step(pop, cfg, objective, rng, generation);
    }
    throw ParameterError("unknown algorithm");
}

// ---------------------------------------------------------------------------
// Full run
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint64_t kInitStreamTag = 0x696e6974ull; // "init"
inline constexpr std::uint64_t kStepStreamTag = 0x73746570ull; // "step"

template <class G, class ObjectiveT>
RunTrace<G> run_impl(const EAConfig& cfg, ObjectiveT& objective, std::vector<Individual<G>> pop,
                     std::uint64_t evals_before, std::uint64_t samples_before) {
    RunTrace<G> trace;
    trace.records.reserve(cfg.budget + 1);
    trace.records.push_back(
        record_state<G>(0, pop, std::numeric_limits<double>::quiet_NaN()));

    Rng step_rng(derive_seed(cfg.run_seed, {kStepStreamTag}));
    for (std::uint64_t g = 1; g <= cfg.budget; ++g) {
        try {
            trace.records.push_back(step(pop, cfg, objective, step_rng, g));
        } catch (const EvaluationError& e) {
            throw EvaluationError("generation " + std::to_string(g) + ": " + e.what());
        } catch (const ProtocolError& e) {
            throw ProtocolError("generation " + std::to_string(g) + ": " + e.what());
        }
    }
    trace.final_population = std::move(pop);
    trace.total_evaluations = objective.evaluations() - evals_before;
    trace.total_samples = objective.samples_consumed() - samples_before;
    return trace;
}

} // namespace detail

// Run from an already evaluated population (the shared-initial-population
// protocol): the initial evaluations are not re-consumed.
template <class G>
RunTrace<G> run(const EAConfig& cfg, Objective<G>& objective,
                std::vector<Individual<G>> initial_population) {
    cfg.validate();
    if (initial_population.size() != cfg.population_size)
        throw ParameterError("initial population size does not match config");
    for (const auto& ind : initial_population)
        if (!ind.evaluated()) throw ParameterError("initial population must be evaluated");
    return detail::run_impl(cfg, objective, std::move(initial_population),
                            objective.evaluations(), objective.samples_consumed());
}

// Run from genome specs: draws P genomes from the init stream and evaluates
// them before stepping. GenomeSpec is the argument random_genome accepts
// (bit length or bounds vector).
template <class G, class GenomeSpec>
RunTrace<G> run_from_spec(const EAConfig& cfg, Objective<G>& objective, const GenomeSpec& spec) {
    cfg.validate();
    const std::uint64_t evals_before = objective.evaluations();
    const std::uint64_t samples_before = objective.samples_consumed();
    const std::uint64_t init_seed =
        cfg.init_seed.value_or(derive_seed(cfg.run_seed, {detail::kInitStreamTag}));
    Rng init_rng(init_seed);
    std::vector<Individual<G>> pop;
    pop.reserve(cfg.population_size);
    for (std::uint32_t i = 0; i < cfg.population_size; ++i) {
        G genome = random_genome(spec, init_rng);
        const double fitness = objective.evaluate(genome);
        pop.push_back(
            Individual<G>{std::move(genome), fitness, objective.samples_per_evaluation()});
    }
    return detail::run_impl(cfg, objective, std::move(pop), evals_before, samples_before);
}

// Initial population shared across paired runs: drawn from `seed`, evaluated
// through `objective` once.
template <class G, class GenomeSpec>
std::vector<Individual<G>> make_initial_population(std::uint32_t population_size,
                                                   const GenomeSpec& spec, std::uint64_t seed,
                                                   Objective<G>& objective) {
    Rng init_rng(seed);
    std::vector<Individual<G>> pop;
    pop.reserve(population_size);
    for (std::uint32_t i = 0; i < population_size; ++i) {
        G genome = random_genome(spec, init_rng);
        const double fitness = objective.evaluate(genome);
        pop.push_back(
            Individual<G>{std::move(genome), fitness, objective.samples_per_evaluation()});
    }
    return pop;
}

} // namespace hdea
