// Minimal library walkthrough: build an NK landscape, run the baseline EA and
// the haploid-diploid EA on it with a shared initial population seed, and
// print the final fitness of each.

#include <iostream>
#include <memory>

#include "hdea/evolve.hpp"
#include "hdea/nk.hpp"
#include "hdea/objective.hpp"

int main() {
    using namespace hdea;

    const auto landscape = nk::generate(/*n=*/50, /*k=*/10, /*seed=*/7);

    EAConfig cfg;
    cfg.population_size = 30;
    cfg.tournament_size = 2;
    cfg.budget = 20'000;
    cfg.run_seed = 1;
    cfg.init_seed = 99; // shared so both algorithms start from the same population

    for (auto algorithm : {Algorithm::baseline, Algorithm::hdea}) {
        cfg.algorithm = algorithm;
        Objective<BitGenome> objective(std::make_shared<NkSampler>(landscape),
                                       Direction::maximize, 1, cfg.run_seed);
        const auto trace = run_from_spec(cfg, objective, std::size_t{50});
        std::cout << to_string(algorithm) << ": best " << trace.final_best() << " after "
                  << trace.total_evaluations << " evaluations\n";
    }
    return 0;
}
