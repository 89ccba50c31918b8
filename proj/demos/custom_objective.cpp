// Plugging a custom objective into the optimizer: any Sampler subclass works.
// Here a 6-parameter design problem is scored in-process; swap the sampler
// for ExternalSampler to drive a real simulator over the line protocol.

#include <cmath>
#include <iostream>
#include <memory>

#include "hdea/evolve.hpp"
#include "hdea/objective.hpp"

namespace {

class SphereSampler final : public hdea::Sampler<hdea::RealGenome> {
public:
    double raw_sample(const hdea::RealGenome& g, const hdea::SampleContext&) override {
        double s = 0.0;
        for (double v : g.values) s += v * v;
        return s;
    }
};

} // namespace

int main() {
    using namespace hdea;

    SearchSpace space;
    for (int i = 0; i < 6; ++i)
        space.dims.push_back({"x" + std::to_string(i), {-5.0, 5.0}});

    EAConfig cfg;
    cfg.algorithm = Algorithm::hdea;
    cfg.population_size = 50;
    cfg.tournament_size = 3;
    cfg.budget = 100;
    cfg.run_seed = 2024;
    cfg.variation.crossover_kind = CrossoverKind::uniform;
    cfg.variation.crossover_rate = 0.8;
    cfg.variation.mutation_kind = MutationKind::per_allele_real;
    cfg.variation.per_allele_rate = 0.2;
    cfg.variation.step_fraction = 0.05;

    Objective<RealGenome> objective(std::make_shared<SphereSampler>(), Direction::minimize,
                                    /*samples=*/1, cfg.run_seed);
    const auto trace = run_from_spec(cfg, objective, space.bounds());
    const auto& best = trace.best_individual();
    std::cout << "best raw value " << objective.raw_from_internal(best.fitness) << " at (";
    for (std::size_t i = 0; i < best.genome.values.size(); ++i)
        std::cout << (i ? ", " : "") << best.genome.values[i];
    std::cout << ")\n";
    return 0;
}
