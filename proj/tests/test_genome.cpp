#include <catch2/catch.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "hdea/genome.hpp"

using namespace hdea;

namespace {

BitGenome bits(const std::string& s) {
    BitGenome g;
    for (char c : s) g.bits.push_back(c == '1');
    return g;
}

std::size_t hamming(const BitGenome& a, const BitGenome& b) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a.bits[i] != b.bits[i];
    return d;
}

RealGenome reals(std::vector<double> v, Interval iv) {
    RealGenome g;
    g.values = std::move(v);
    g.bounds.assign(g.values.size(), iv);
    return g;
}

// per-position multiset conservation for a pair of children vs their parents
template <class G>
bool conserves_alleles(const G& a, const G& b, const G& c1, const G& c2);

bool conserves_alleles(const BitGenome& a, const BitGenome& b, const BitGenome& c1,
                       const BitGenome& c2) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool keep = c1.bits[i] == a.bits[i] && c2.bits[i] == b.bits[i];
        const bool swap = c1.bits[i] == b.bits[i] && c2.bits[i] == a.bits[i];
        if (!keep && !swap) return false;
    }
    return true;
}

bool conserves_alleles(const RealGenome& a, const RealGenome& b, const RealGenome& c1,
                       const RealGenome& c2) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool keep = c1.values[i] == a.values[i] && c2.values[i] == b.values[i];
        const bool swap = c1.values[i] == b.values[i] && c2.values[i] == a.values[i];
        if (!keep && !swap) return false;
    }
    return true;
}

} // namespace

TEST_CASE("one-point crossover splices at the cut") {
    const auto [c1, c2] = one_point_crossover(bits("000"), bits("111"), 1);
    REQUIRE(to_string(c1) == "011");
    REQUIRE(to_string(c2) == "100");
}

TEST_CASE("one-point crossover boundary cuts") {
    const auto a = bits("0101"), b = bits("1110");
    {
        const auto [c1, c2] = one_point_crossover(a, b, 0);
        REQUIRE(c1 == b);
        REQUIRE(c2 == a);
    }
    {
        const auto [c1, c2] = one_point_crossover(a, b, 4);
        REQUIRE(c1 == a);
        REQUIRE(c2 == b);
    }
}

TEST_CASE("crossover of identical parents is the identity") {
    Rng rng(5);
    const auto x = bits("10110");
    const auto [c1, c2] = one_point_crossover(x, x, 2);
    REQUIRE(c1 == x);
    REQUIRE(c2 == x);
    const auto [u1, u2] = uniform_crossover(x, x, rng);
    REQUIRE(u1 == x);
    REQUIRE(u2 == x);
}

TEST_CASE("crossover rejects mismatched lengths") {
    Rng rng(1);
    REQUIRE_THROWS_AS(one_point_crossover(bits("00"), bits("000"), 1), RepresentationError);
    REQUIRE_THROWS_AS(uniform_crossover(bits("00"), bits("000"), rng), RepresentationError);
}

TEST_CASE("rng-driven one-point cut is interior") {
    Rng rng(17);
    const auto a = bits("0000"), b = bits("1111");
    for (int i = 0; i < 2'000; ++i) {
        const auto [c1, c2] = one_point_crossover(a, b, rng);
        REQUIRE(c1 != a); // cut >= 1 guarantees at least one tail allele swaps
        REQUIRE(c1 != b);
        REQUIRE(conserves_alleles(a, b, c1, c2));
    }
}

TEST_CASE("uniform crossover conserves each position's allele pair") {
    Rng rng(23);
    const auto a = bits("00"), b = bits("11");
    for (int i = 0; i < 500; ++i) {
        const auto [c1, c2] = uniform_crossover(a, b, rng);
        for (std::size_t p = 0; p < 2; ++p) REQUIRE(c1.bits[p] != c2.bits[p]);
    }
}

TEST_CASE("uniform crossover swap frequency is one half") {
    // Monte Carlo against the binomial: 10,000 trials, tolerance 0.02.
    Rng rng(29);
    const auto a = bits("0000000000"), b = bits("1111111111");
    const int trials = 10'000;
    std::vector<int> swaps(a.size(), 0);
    for (int t = 0; t < trials; ++t) {
        const auto [c1, c2] = uniform_crossover(a, b, rng);
        for (std::size_t p = 0; p < a.size(); ++p)
            if (c1.bits[p] == b.bits[p]) ++swaps[p];
    }
    for (auto s : swaps) {
        const double freq = static_cast<double>(s) / trials;
        REQUIRE(freq == Approx(0.5).margin(0.02));
    }
}

TEST_CASE("single-bit mutation flips exactly one position") {
    Rng rng(31);
    {
        const auto out = mutate_single_bit(bits("0"), rng);
        REQUIRE(to_string(out) == "1");
    }
    const auto g = bits("0000");
    std::map<std::string, int> hits;
    const int trials = 10'000;
    for (int t = 0; t < trials; ++t) {
        const auto out = mutate_single_bit(g, rng);
        REQUIRE(hamming(g, out) == 1);
        ++hits[to_string(out)];
    }
    REQUIRE(hits.size() == 4);
    for (const auto& [key, count] : hits)
        REQUIRE(static_cast<double>(count) / trials == Approx(0.25).margin(0.02));
}

TEST_CASE("single-bit mutation rejects an empty genome") {
    Rng rng(1);
    REQUIRE_THROWS_AS(mutate_single_bit(BitGenome{}, rng), RepresentationError);
}

TEST_CASE("per-allele mutation honors rate zero") {
    Rng rng(37);
    VariationConfig cfg;
    cfg.mutation_kind = MutationKind::per_allele_real;
    cfg.per_allele_rate = 0.0;
    const auto g = reals({0.1, 0.5, 0.9}, {0.0, 1.0});
    REQUIRE(mutate_per_allele(g, cfg, rng) == g);
}

TEST_CASE("per-allele mutation clamps at the boundary") {
    VariationConfig cfg;
    cfg.mutation_kind = MutationKind::per_allele_real;
    cfg.per_allele_rate = 1.0;
    cfg.step_fraction = 0.05;
    const auto g = reals({1.0}, {0.0, 1.0});
    int clamped = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        const auto out = mutate_per_allele(g, cfg, rng);
        REQUIRE(out.values[0] <= 1.0);
        REQUIRE(out.values[0] >= 0.95);
        if (out.values[0] == 1.0) ++clamped; // positive step clamped back to hi
    }
    REQUIRE(clamped > 50);
}

TEST_CASE("per-allele mutation perturbs mu*L alleles on average") {
    Rng rng(41);
    VariationConfig cfg;
    cfg.mutation_kind = MutationKind::per_allele_real;
    cfg.per_allele_rate = 0.2;
    const auto g = reals({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, {0.0, 1.0});
    const int trials = 10'000;
    long total = 0;
    for (int t = 0; t < trials; ++t) {
        const auto out = mutate_per_allele(g, cfg, rng);
        for (std::size_t i = 0; i < 6; ++i)
            if (out.values[i] != g.values[i]) ++total;
    }
    REQUIRE(static_cast<double>(total) / trials == Approx(1.2).margin(0.1));
}

TEST_CASE("meiosis always returns the parents verbatim") {
    Rng rng(43);
    VariationConfig cfg; // one-point, rate 1
    for (int t = 0; t < 1'000; ++t) {
        const auto x = random_genome(12, rng);
        const auto y = random_genome(12, rng);
        const auto d = make_diploid(Individual<BitGenome>{x, 0.25},
                                    Individual<BitGenome>{y, 0.75});
        const auto gametes = meiosis(d, cfg, rng);
        REQUIRE(gametes[0] == x);
        REQUIRE(gametes[1] == y);
        REQUIRE(conserves_alleles(x, y, gametes[2], gametes[3]));
        for (const auto& g : gametes)
            for (std::size_t i = 0; i < g.size(); ++i)
                REQUIRE((g.bits[i] == x.bits[i] || g.bits[i] == y.bits[i]));
    }
}

TEST_CASE("meiosis on a homozygous diploid is the identity") {
    Rng rng(47);
    VariationConfig cfg;
    const auto x = bits("101010");
    const auto d = make_diploid(Individual<BitGenome>{x, 0.5}, Individual<BitGenome>{x, 0.5});
    for (int t = 0; t < 100; ++t)
        for (const auto& g : meiosis(d, cfg, rng)) REQUIRE(g == x);
}

TEST_CASE("meiosis with a failed crossover draw transmits parental copies") {
    Rng rng(53);
    VariationConfig cfg;
    cfg.crossover_rate = 0.0;
    const auto x = bits("000"), y = bits("111");
    const auto d = make_diploid(Individual<BitGenome>{x, 0.0}, Individual<BitGenome>{y, 1.0});
    const auto gametes = meiosis(d, cfg, rng);
    REQUIRE(gametes[2] == x);
    REQUIRE(gametes[3] == y);
}

TEST_CASE("diploid fitness is the exact mean") {
    const auto d = make_diploid(Individual<BitGenome>{bits("00"), 0.4},
                                Individual<BitGenome>{bits("11"), 0.6});
    REQUIRE(d.combined_fitness == 0.5);
    REQUIRE_THROWS_AS(make_diploid(Individual<BitGenome>{bits("0"), 0.1},
                                   Individual<BitGenome>{bits("01"), 0.2}),
                      RepresentationError);
}

TEST_CASE("random bit genomes have the right length and alphabet") {
    Rng rng(59);
    const auto g = random_genome(50, rng);
    REQUIRE(g.size() == 50);
    for (auto b : g.bits) REQUIRE((b == 0 || b == 1));
    REQUIRE_THROWS_AS(random_genome(std::size_t{0}, rng), ParameterError);
}

TEST_CASE("random real genomes respect degenerate intervals") {
    Rng rng(61);
    const auto g = random_genome(std::vector<Interval>{{2.5, 2.5}, {2.5, 2.5}}, rng);
    REQUIRE(g.values == std::vector<double>{2.5, 2.5});
}

TEST_CASE("random real draws center on the interval midpoint") {
    Rng rng(67);
    const std::vector<Interval> bounds{{0.0, 1.0}};
    double sum = 0.0;
    const int trials = 10'000;
    for (int t = 0; t < trials; ++t) sum += random_genome(bounds, rng).values[0];
    REQUIRE(sum / trials == Approx(0.5).margin(0.02));
}

TEST_CASE("variation config rejects out-of-range values") {
    VariationConfig bad;
    bad.crossover_rate = 1.5;
    REQUIRE_THROWS_AS(bad.validate(), ParameterError);
    bad = VariationConfig{};
    bad.per_allele_rate = -0.1;
    REQUIRE_THROWS_AS(bad.validate(), ParameterError);
    bad = VariationConfig{};
    bad.step_fraction = 0.0;
    REQUIRE_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("stochastic operators are deterministic given the seed") {
    VariationConfig cfg;
    cfg.mutation_kind = MutationKind::single_bit_flip;
    Rng r1(71), r2(71);
    const auto a = random_genome(30, r1);
    const auto b = random_genome(30, r2);
    REQUIRE(a == b);
    const auto c1 = uniform_crossover(a, random_genome(30, r1), r1);
    const auto c2 = uniform_crossover(b, random_genome(30, r2), r2);
    REQUIRE(c1 == c2);
    REQUIRE(mutate_single_bit(c1.first, r1) == mutate_single_bit(c2.first, r2));
}
