#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hdea/error.hpp"
#include "hdea/rng.hpp"

namespace hdea {

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

struct BitGenome {
    std::vector<std::uint8_t> bits; // each 0 or 1

    std::size_t size() const noexcept { return bits.size(); }
    bool operator==(const BitGenome&) const = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const noexcept { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

// Bounded real vector. Bounds travel with the genome so mutation can clamp
// without consulting external state.
struct RealGenome {
    std::vector<double> values;
    std::vector<Interval> bounds; // same length as values

    std::size_t size() const noexcept { return values.size(); }
    bool operator==(const RealGenome&) const = default;
};

inline std::string to_string(const BitGenome& g) {
    std::string s;
    s.reserve(g.size());
    for (auto b : g.bits) s.push_back(b ? '1' : '0');
    return s;
}

// Evaluated haploid.
template <class G>
struct Individual {
    G genome;
    double fitness = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t eval_count = 0; // objective samples consumed to set fitness

    bool evaluated() const noexcept { return !std::isnan(fitness); }
};

// Ordered pair of haploids whose shared fitness is the exact arithmetic mean
// of the two members' fitnesses.
template <class G>
struct Diploid {
    Individual<G> first;
    Individual<G> second;
    double combined_fitness = std::numeric_limits<double>::quiet_NaN();
};

template <class G>
Diploid<G> make_diploid(Individual<G> first, Individual<G> second) {
    if (first.genome.size() != second.genome.size())
        throw RepresentationError("diploid halves differ in length");
    Diploid<G> d{std::move(first), std::move(second), 0.0};
    d.combined_fitness = (d.first.fitness + d.second.fitness) / 2.0;
    return d;
}

// ---------------------------------------------------------------------------
// Variation configuration
// ---------------------------------------------------------------------------

enum class CrossoverKind { one_point, uniform };

// `none` disables mutation entirely; used by convergence/fixed-point tests.
enum class MutationKind { single_bit_flip, per_allele_real, none };

struct VariationConfig {
    CrossoverKind crossover_kind = CrossoverKind::one_point;
    double crossover_rate = 1.0;  // X: probability the crossover operator fires at all
    MutationKind mutation_kind = MutationKind::single_bit_flip;
    double per_allele_rate = 0.2; // mu: per-position mutation probability (real genomes)
    double step_fraction = 0.05;  // s: mutation step is uniform in +-s of the dimension range

    void validate() const {
        if (crossover_rate < 0.0 || crossover_rate > 1.0)
            throw ParameterError("crossover_rate must be in [0,1]");
        if (per_allele_rate < 0.0 || per_allele_rate > 1.0)
            throw ParameterError("per_allele_rate must be in [0,1]");
        if (!(step_fraction > 0.0))
            throw ParameterError("step_fraction must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Crossover
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
std::pair<std::vector<T>, std::vector<T>> splice(const std::vector<T>& a,
                                                 const std::vector<T>& b,
                                                 std::size_t cut) {
    std::vector<T> c1(a.begin(), a.begin() + cut);
    c1.insert(c1.end(), b.begin() + cut, b.end());
    std::vector<T> c2(b.begin(), b.begin() + cut);
    c2.insert(c2.end(), a.begin() + cut, a.end());
    return {std::move(c1), std::move(c2)};
}

inline void require_same_shape(const BitGenome& a, const BitGenome& b) {
    if (a.size() != b.size())
        throw RepresentationError("bit genome length mismatch: " + std::to_string(a.size()) +
                                  " vs " + std::to_string(b.size()));
}

inline void require_same_shape(const RealGenome& a, const RealGenome& b) {
    if (a.size() != b.size())
        throw RepresentationError("real genome length mismatch: " + std::to_string(a.size()) +
                                  " vs " + std::to_string(b.size()));
    if (a.bounds != b.bounds)
        throw RepresentationError("real genomes belong to different search spaces");
}

} // namespace detail

// child1 = a[0..cut) ++ b[cut..L); child2 the mirror. 0 <= cut <= L.
inline std::pair<BitGenome, BitGenome> one_point_crossover(const BitGenome& a, const BitGenome& b,
                                                           std::size_t cut) {
    detail::require_same_shape(a, b);
    if (cut > a.size()) throw ParameterError("cut point beyond genome length");
    auto [c1, c2] = detail::splice(a.bits, b.bits, cut);
    return {BitGenome{std::move(c1)}, BitGenome{std::move(c2)}};
}

inline std::pair<RealGenome, RealGenome> one_point_crossover(const RealGenome& a, const RealGenome& b,
                                                             std::size_t cut) {
    detail::require_same_shape(a, b);
    if (cut > a.size()) throw ParameterError("cut point beyond genome length");
    auto [c1, c2] = detail::splice(a.values, b.values, cut);
    return {RealGenome{std::move(c1), a.bounds}, RealGenome{std::move(c2), a.bounds}};
}

// EA-facing variant: cut drawn uniformly from 1..L-1 so recombination is never
// a guaranteed no-op. Length-1 genomes have no interior cut; children are copies.
template <class G>
std::pair<G, G> one_point_crossover(const G& a, const G& b, Rng& rng) {
    detail::require_same_shape(a, b);
    if (a.size() < 2) return {a, b};
    const std::size_t cut = 1 + static_cast<std::size_t>(rng.uniform_index(a.size() - 1));
    return one_point_crossover(a, b, cut);
}

namespace detail {

// One coin per position, position order 0..L-1: heads swaps the pair.
template <class T>
void uniform_mix(std::vector<T>& x, std::vector<T>& y, Rng& rng) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (rng.uniform_index(2) == 1) std::swap(x[i], y[i]);
}

} // namespace detail

inline std::pair<BitGenome, BitGenome> uniform_crossover(const BitGenome& a, const BitGenome& b,
                                                         Rng& rng) {
    detail::require_same_shape(a, b);
    auto out = std::pair<BitGenome, BitGenome>{a, b};
    detail::uniform_mix(out.first.bits, out.second.bits, rng);
    return out;
}

inline std::pair<RealGenome, RealGenome> uniform_crossover(const RealGenome& a, const RealGenome& b,
                                                           Rng& rng) {
    detail::require_same_shape(a, b);
    auto out = std::pair<RealGenome, RealGenome>{a, b};
    detail::uniform_mix(out.first.values, out.second.values, rng);
    return out;
}

// Dispatch on the configured kind. The crossover_rate gate lives in the
// callers (EA step / meiosis), not here.
template <class G>
std::pair<G, G> apply_crossover(const G& a, const G& b, const VariationConfig& cfg, Rng& rng) {
    switch (cfg.crossover_kind) {
    case CrossoverKind::one_point: return one_point_crossover(a, b, rng);
    case CrossoverKind::uniform: return uniform_crossover(a, b, rng);
    }
    throw ParameterError("unknown crossover kind");
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

// Flips exactly one uniformly chosen bit: Hamming distance to input is 1.
inline BitGenome mutate_single_bit(const BitGenome& g, Rng& rng) {
    if (g.size() == 0) throw RepresentationError("cannot mutate an empty genome");
    BitGenome out = g;
    const std::size_t pos = static_cast<std::size_t>(rng.uniform_index(g.size()));
    out.bits[pos] ^= 1u;
    return out;
}

// Each allele independently mutates with probability mu; a hit adds a uniform
// step from +-step_fraction of the dimension range, then clamps to bounds.
// Draw order per position: gate first, then (only on a hit) the step.
inline RealGenome mutate_per_allele(const RealGenome& g, const VariationConfig& cfg, Rng& rng) {
    RealGenome out = g;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!rng.bernoulli(cfg.per_allele_rate)) continue;
        const Interval& bound = out.bounds[i];
        const double span = cfg.step_fraction * bound.width();
        const double step = rng.uniform_real(-span, span);
        out.values[i] = std::clamp(out.values[i] + step, bound.lo, bound.hi);
    }
    return out;
}

inline BitGenome apply_mutation(const BitGenome& g, const VariationConfig& cfg, Rng& rng) {
    switch (cfg.mutation_kind) {
    case MutationKind::single_bit_flip: return mutate_single_bit(g, rng);
    case MutationKind::none: return g;
    case MutationKind::per_allele_real:
        throw RepresentationError("per-allele-real mutation applied to a bit genome");
    }
    throw ParameterError("unknown mutation kind");
}

inline RealGenome apply_mutation(const RealGenome& g, const VariationConfig& cfg, Rng& rng) {
    switch (cfg.mutation_kind) {
    case MutationKind::per_allele_real: return mutate_per_allele(g, cfg, rng);
    case MutationKind::none: return g;
    case MutationKind::single_bit_flip:
        throw RepresentationError("single-bit-flip mutation applied to a real genome");
    }
    throw ParameterError("unknown mutation kind");
}

// ---------------------------------------------------------------------------
// Meiosis
// ---------------------------------------------------------------------------

// Two-step meiosis: both genomes are replicated and the copies recombine,
// yielding four gametes {X, Y, R1, R2}. The first two are always the verbatim
// parental genomes; the recombinants conserve the per-position allele multiset.
// If the crossover_rate gate fails, the recombinants are parental copies too.
// Draw order: gate, then the crossover draws (if the gate passed).
template <class G>
std::array<G, 4> meiosis(const Diploid<G>& d, const VariationConfig& cfg, Rng& rng) {
    const G& x = d.first.genome;
    const G& y = d.second.genome;
    detail::require_same_shape(x, y);
    if (rng.bernoulli(cfg.crossover_rate)) {
        auto [r1, r2] = apply_crossover(x, y, cfg, rng);
        return {x, y, std::move(r1), std::move(r2)};
    }
    return {x, y, x, y};
}

// ---------------------------------------------------------------------------
// Random initialization
// ---------------------------------------------------------------------------

inline BitGenome random_genome(std::size_t n_bits, Rng& rng) {
    if (n_bits == 0) throw ParameterError("genome length must be positive");
    BitGenome g;
    g.bits.resize(n_bits);
    for (auto& b : g.bits) b = static_cast<std::uint8_t>(rng.uniform_index(2));
    return g;
}

inline RealGenome random_genome(const std::vector<Interval>& bounds, Rng& rng) {
    if (bounds.empty()) throw ParameterError("genome length must be positive");
    for (const auto& iv : bounds)
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi)
            throw ParameterError("real genome bounds must be finite with lo <= hi");
    RealGenome g;
    g.bounds = bounds;
    g.values.reserve(bounds.size());
    for (const auto& iv : bounds) g.values.push_back(rng.uniform_real(iv.lo, iv.hi));
    return g;
}

} // namespace hdea
