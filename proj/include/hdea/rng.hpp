#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace hdea {

// All randomness in this library flows through Rng, a xoshiro256** 1.0
// generator seeded through SplitMix64. Both algorithms are fully specified
// integer arithmetic, so a given seed produces the same draw sequence on
// every platform and compiler. std::random distributions are deliberately
// not used anywhere: the standard does not pin their output, and run traces
// are required to be bit-identical for a fixed seed.
//
// Streams: independent substreams are derived with derive_seed(base, words...),
// which folds each word into the base through the SplitMix64 finalizer. The
// derivation is order-sensitive, so (seed, landscape, run) and
// (seed, run, landscape) name different streams.

namespace detail {

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl64(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

// High 64 bits of a 64x64 multiply, without relying on __int128.
constexpr std::uint64_t mulhi64(std::uint64_t a, std::uint64_t b) noexcept {
    const std::uint64_t a_lo = a & 0xffffffffull, a_hi = a >> 32;
    const std::uint64_t b_lo = b & 0xffffffffull, b_hi = b >> 32;
    const std::uint64_t p0 = a_lo * b_lo;
    const std::uint64_t p1 = a_lo * b_hi;
    const std::uint64_t p2 = a_hi * b_lo;
    const std::uint64_t p3 = a_hi * b_hi;
    const std::uint64_t carry = ((p0 >> 32) + (p1 & 0xffffffffull) + (p2 & 0xffffffffull)) >> 32;
    return p3 + (p1 >> 32) + (p2 >> 32) + carry;
}

} // namespace detail

// Order-sensitive seed/stream derivation: each word is mixed in through the
// SplitMix64 finalizer.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t state = base;
    (void)detail::splitmix64_next(state);
    for (std::uint64_t w : words) {
        state ^= w;
        (void)detail::splitmix64_next(state);
    }
    std::uint64_t final_state = state;
    return detail::splitmix64_next(final_state);
}

class Rng {
public:
    explicit constexpr Rng(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64_next(sm);
        // xoshiro's all-zero state is absorbing; SplitMix64 cannot emit four
        // zero words in a row, but guard anyway.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static constexpr Rng stream(std::uint64_t base, std::uint64_t stream_id) noexcept {
        return Rng(derive_seed(base, {stream_id}));
    }

    constexpr std::uint64_t next_u64() noexcept {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform in [0,1): top 53 bits scaled, the standard xoshiro recipe.
    constexpr double uniform_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    constexpr double uniform_real(double lo, double hi) noexcept {
        return lo + uniform_double() * (hi - lo);
    }

    // Uniform in [0, bound) via Lemire's multiply-with-rejection; exactly
    // unbiased, deterministic number of draws given the stream. bound >= 1.
    constexpr std::uint64_t uniform_index(std::uint64_t bound) noexcept {
        assert(bound > 0);
        std::uint64_t x = next_u64();
        std::uint64_t low = x * bound;
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = next_u64();
                low = x * bound;
            }
        }
        return detail::mulhi64(x, bound);
    }

    // Uniform over {0..n-1} \ {excluded}; consumes exactly one uniform_index.
    constexpr std::uint64_t uniform_index_excluding(std::uint64_t n, std::uint64_t excluded) noexcept {
        assert(n >= 2 && excluded < n);
        std::uint64_t draw = uniform_index(n - 1);
        return draw >= excluded ? draw + 1 : draw;
    }

    constexpr bool bernoulli(double p) noexcept { return uniform_double() < p; }

    // Basic Box-Muller, one value per call (two uniforms consumed). Exact
    // cross-platform bit-identity is not guaranteed here (it depends on libm);
    // the evolutionary loops never draw normals, only objectives do.
    double normal(double mean, double sd) noexcept {
        const double u1 = uniform_double();
        const double u2 = uniform_double();
        const double radius = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + sd * radius * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    constexpr bool operator==(const Rng&) const noexcept = default;

private:
    std::array<std::uint64_t, 4> state_{};
};

} // namespace hdea
