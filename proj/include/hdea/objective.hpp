#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hdea/error.hpp"
#include "hdea/genome.hpp"
#include "hdea/nk.hpp"
#include "hdea/rng.hpp"

namespace hdea {

enum class Direction { maximize, minimize };

inline std::string to_string(Direction d) {
    return d == Direction::maximize ? "maximize" : "minimize";
}

// ---------------------------------------------------------------------------
// Search space
// ---------------------------------------------------------------------------

struct SearchDimension {
    std::string name;
    Interval bounds;
};

struct SearchSpace {
    std::vector<SearchDimension> dims;

    std::size_t size() const noexcept { return dims.size(); }

    std::vector<Interval> bounds() const {
        std::vector<Interval> out;
        out.reserve(dims.size());
        for (const auto& d : dims) out.push_back(d.bounds);
        return out;
    }

    // The six worker-cell design parameters of the cargo-delivery scenario.
    static SearchSpace worker_cell_design() {
        return SearchSpace{{
            {"attached_worker_migration_bias", {0.0, 1.0}},
            {"unattached_worker_migration_bias", {0.0, 1.0}},
            {"worker_relative_adhesion", {0.0, 10.0}},
            {"worker_relative_repulsion", {0.0, 10.0}},
            {"worker_motility_persistence_time_min", {0.0, 10.0}},
            {"cargo_release_o2_threshold_mmhg", {0.0, 20.0}},
        }};
    }
};

// ---------------------------------------------------------------------------
// Raw samplers
// ---------------------------------------------------------------------------

// Identifies one sample of one evaluation. The seed is derived from
// (sampler seed, evaluation index, sample index) by the Objective wrapper, so
// a stochastic evaluator can reproduce any single sample from its context.
struct SampleContext {
    std::uint64_t evaluation_index = 0;
    std::uint32_t sample_index = 0;
    std::uint64_t seed = 0;
};

// One raw (pre-direction, pre-averaging) objective sample.
template <class G>
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual double raw_sample(const G& genome, const SampleContext& ctx) = 0;
};

class NkSampler final : public Sampler<BitGenome> {
public:
    explicit NkSampler(nk::Landscape landscape) : landscape_(std::move(landscape)) {}

    double raw_sample(const BitGenome& g, const SampleContext&) override {
        return nk::evaluate(landscape_, g);
    }

    const nk::Landscape& landscape() const noexcept { return landscape_; }

private:
    nk::Landscape landscape_;
};

// Desk-scale stand-in for a stochastic simulator: a rugged, non-separable
// base function of the six design parameters plus seeded Gaussian noise.
//
// With u_i = (x_i - lo_i)/(hi_i - lo_i) and t_i = u_i - u*_i (u* the
// normalized optimum, indices cyclic):
//
//   base(x) = offset + scale * [ mean_i t_i^2
//                                + ripple   * mean_i sin^2(ripple_freq * pi * t_i)
//                                + coupling * mean_i sin^2(coupling_freq * pi * (t_i + t_{i+1})) ]
//   raw(x)  = base(x) + Normal(0, noise_sd)   (noise drawn from Rng(ctx.seed))
//
// All three bracketed terms are >= 0 and vanish at u*, so base is minimal
// exactly at the documented optimum. The ripple term adds per-dimension local
// optima; the coupling term links neighboring dimensions, making the
// landscape epistatic the way a multicellular simulation is; noise_sd sets
// the evaluation stochasticity.
// Defaults put raw values in the 400-600 zone with evaluation noise of the
// same magnitude a cell-count simulation shows, and give the landscape both
// per-dimension ripple and cross-dimension coupling.
struct SurrogateParams {
    std::vector<Interval> bounds = SearchSpace::worker_cell_design().bounds();
    std::vector<double> optimum = {0.7, 0.3, 2.0, 1.0, 8.0, 11.0}; // raw coordinates
    double offset = 400.0;
    double scale = 150.0;
    double ripple = 0.15;
    double ripple_freq = 6.0;
    double coupling = 1.0;
    double coupling_freq = 2.0;
    double noise_sd = 30.0;

    void validate() const {
        if (bounds.size() != optimum.size() || bounds.empty())
            throw ParameterError("surrogate: bounds/optimum dimension mismatch");
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            if (!(bounds[i].width() > 0.0))
                throw ParameterError("surrogate: bounds must have positive width");
            if (optimum[i] < bounds[i].lo || optimum[i] > bounds[i].hi)
                throw ParameterError("surrogate: optimum outside bounds");
        }
        if (noise_sd < 0.0) throw ParameterError("surrogate: noise_sd must be >= 0");
    }
};

inline double surrogate_base(const SurrogateParams& p, const std::vector<double>& x) {
    if (x.size() != p.bounds.size())
        throw RepresentationError("surrogate: genome dimension mismatch");
    constexpr double pi = 3.141592653589793238462643383279502884;
    const std::size_t n = x.size();
    std::vector<double> t(n);
    double quad = 0.0, rip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < p.bounds[i].lo || x[i] > p.bounds[i].hi)
            throw ParameterError("surrogate: genome outside bounds");
        t[i] = (x[i] - p.optimum[i]) / p.bounds[i].width();
        quad += t[i] * t[i];
        const double s = std::sin(p.ripple_freq * pi * t[i]);
        rip += s * s;
    }
    double pair = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sin(p.coupling_freq * pi * (t[i] + t[(i + 1) % n]));
        pair += s * s;
    }
    const double dims = static_cast<double>(n);
    return p.offset + p.scale * (quad / dims + p.ripple * rip / dims + p.coupling * pair / dims);
}

inline double surrogate_evaluate(const SurrogateParams& p, const std::vector<double>& x,
                                 std::uint64_t seed) {
    const double base = surrogate_base(p, x);
    if (p.noise_sd == 0.0) return base;
    Rng rng(seed);
    return base + rng.normal(0.0, p.noise_sd);
}

class SurrogateSampler final : public Sampler<RealGenome> {
public:
    explicit SurrogateSampler(SurrogateParams params) : params_(std::move(params)) {
        params_.validate();
    }

    double raw_sample(const RealGenome& g, const SampleContext& ctx) override {
        return surrogate_evaluate(params_, g.values, ctx.seed);
    }

    const SurrogateParams& params() const noexcept { return params_; }

private:
    SurrogateParams params_;
};

// ---------------------------------------------------------------------------
// Static-sampling + direction wrapper
// ---------------------------------------------------------------------------

struct EvaluationRecord {
    std::uint64_t index = 0;
    std::vector<double> samples; // raw per-sample values
    double raw_mean = 0.0;
    double internal = 0.0;
};

// Turns a raw sampler into the fitness function the evolutionary loops
// maximize. Each evaluate() draws `samples` raw values (static sampling),
// averages them, and negates the mean when the declared direction is
// minimize. Per-sample seeds come from derive_seed(seed, {eval_index,
// sample_index}); evaluation indices count up from 0 across the wrapper's
// lifetime. Counters make budget accounting auditable.
template <class G>
class Objective {
public:
    Objective(std::shared_ptr<Sampler<G>> sampler, Direction direction, std::uint32_t samples,
              std::uint64_t seed, bool keep_records = false)
        : sampler_(std::move(sampler)), direction_(direction), samples_(samples), seed_(seed),
          keep_records_(keep_records) {
        if (!sampler_) throw ParameterError("objective: null sampler");
        if (samples_ < 1) throw ParameterError("objective: samples must be >= 1");
    }

    double evaluate(const G& genome) {
        const std::uint64_t index = evaluations_++;
        double sum = 0.0;
        std::vector<double> raw;
        if (keep_records_) raw.reserve(samples_);
        for (std::uint32_t s = 0; s < samples_; ++s) {
            SampleContext ctx{index, s, derive_seed(seed_, {index, s})};
            const double v = sampler_->raw_sample(genome, ctx);
            if (std::isnan(v)) throw ProtocolError("objective sample returned NaN");
            sum += v;
            if (keep_records_) raw.push_back(v);
            ++samples_consumed_;
        }
        const double mean = sum / static_cast<double>(samples_);
        const double internal = direction_ == Direction::maximize ? mean : -mean;
        if (keep_records_)
            records_.push_back({index, std::move(raw), mean, internal});
        return internal;
    }

    // Raw value in the problem's native direction for an internal fitness.
    double raw_from_internal(double internal) const noexcept {
        return direction_ == Direction::maximize ? internal : -internal;
    }

    Direction direction() const noexcept { return direction_; }
    std::uint32_t samples_per_evaluation() const noexcept { return samples_; }
    std::uint64_t evaluations() const noexcept { return evaluations_; }
    std::uint64_t samples_consumed() const noexcept { return samples_consumed_; }
    const std::vector<EvaluationRecord>& records() const noexcept { return records_; }

private:
    std::shared_ptr<Sampler<G>> sampler_;
    Direction direction_;
    std::uint32_t samples_;
    std::uint64_t seed_;
    bool keep_records_;
    std::uint64_t evaluations_ = 0;
    std::uint64_t samples_consumed_ = 0;
    std::vector<EvaluationRecord> records_;
};

} // namespace hdea
