#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdea/evolve.hpp"
#include "hdea/external.hpp"
#include "hdea/genome.hpp"
#include "hdea/objective.hpp"

// JSON (de)serialization of run/sweep/compare configuration. Schemas are
// documented in the README; unknown keys are rejected nowhere (forward
// compatibility), missing required keys throw ParseError.

namespace hdea::config {

using nlohmann::json;

// ---- enums ----------------------------------------------------------------

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "baseline") return Algorithm::baseline;
    if (s == "hdea") return Algorithm::hdea;
    if (s == "control-2p") return Algorithm::control_2p;
    throw ParseError("unknown algorithm '" + s + "'");
}

inline ReplacementKind replacement_from_string(const std::string& s) {
    if (s == "replace-worst") return ReplacementKind::replace_worst;
    if (s == "tournament") return ReplacementKind::tournament;
    throw ParseError("unknown replacement kind '" + s + "'");
}

inline CrossoverKind crossover_from_string(const std::string& s) {
    if (s == "one-point") return CrossoverKind::one_point;
    if (s == "uniform") return CrossoverKind::uniform;
    throw ParseError("unknown crossover kind '" + s + "'");
}

inline std::string to_string(CrossoverKind k) {
    return k == CrossoverKind::one_point ? "one-point" : "uniform";
}

inline MutationKind mutation_from_string(const std::string& s) {
    if (s == "single-bit-flip") return MutationKind::single_bit_flip;
    if (s == "per-allele-real") return MutationKind::per_allele_real;
    if (s == "none") return MutationKind::none;
    throw ParseError("unknown mutation kind '" + s + "'");
}

inline std::string to_string(MutationKind k) {
    switch (k) {
    case MutationKind::single_bit_flip: return "single-bit-flip";
    case MutationKind::per_allele_real: return "per-allele-real";
    case MutationKind::none: return "none";
    }
    return "?";
}

inline Direction direction_from_string(const std::string& s) {
    if (s == "maximize") return Direction::maximize;
    if (s == "minimize") return Direction::minimize;
    throw ParseError("unknown direction '" + s + "'");
}

// ---- variation ------------------------------------------------------------

inline VariationConfig variation_from_json(const json& j) {
    VariationConfig v;
    if (j.contains("crossover")) v.crossover_kind = crossover_from_string(j.at("crossover"));
    if (j.contains("crossover_rate")) v.crossover_rate = j.at("crossover_rate").get<double>();
    if (j.contains("mutation")) v.mutation_kind = mutation_from_string(j.at("mutation"));
    if (j.contains("per_allele_rate")) v.per_allele_rate = j.at("per_allele_rate").get<double>();
    if (j.contains("step_fraction")) v.step_fraction = j.at("step_fraction").get<double>();
    v.validate();
    return v;
}

inline json variation_to_json(const VariationConfig& v) {
    return json{{"crossover", to_string(v.crossover_kind)},
                {"crossover_rate", v.crossover_rate},
                {"mutation", to_string(v.mutation_kind)},
                {"per_allele_rate", v.per_allele_rate},
                {"step_fraction", v.step_fraction}};
}

// ---- search space ----------------------------------------------------------

inline SearchSpace space_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "worker-cell-design") return SearchSpace::worker_cell_design();
        throw ParseError("unknown named search space '" + j.get<std::string>() + "'");
    }
    SearchSpace space;
    for (const auto& dim : j) {
        SearchDimension d;
        d.name = dim.at("name").get<std::string>();
        d.bounds.lo = dim.at("lo").get<double>();
        d.bounds.hi = dim.at("hi").get<double>();
        space.dims.push_back(std::move(d));
    }
    if (space.dims.empty()) throw ParseError("search space has no dimensions");
    return space;
}

inline json space_to_json(const SearchSpace& space) {
    json dims = json::array();
    for (const auto& d : space.dims)
        dims.push_back(json{{"name", d.name}, {"lo", d.bounds.lo}, {"hi", d.bounds.hi}});
    return dims;
}

// ---- objective spec ---------------------------------------------------------

struct ObjectiveSpec {
    enum class Kind { nk, surrogate, external };
    Kind kind = Kind::nk;
    Direction direction = Direction::maximize;
    std::uint32_t samples = 1;
    // nk
    std::string landscape_path;
    // surrogate
    SurrogateParams surrogate;
    std::optional<std::uint64_t> surrogate_seed; // fallback: derived per run
    // external
    std::vector<std::string> command;
    std::chrono::milliseconds timeout = std::chrono::minutes(10);
};

inline ObjectiveSpec objective_from_json(const json& j) {
    ObjectiveSpec spec;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "nk")
        spec.kind = ObjectiveSpec::Kind::nk;
    else if (kind == "surrogate")
        spec.kind = ObjectiveSpec::Kind::surrogate;
    else if (kind == "external")
        spec.kind = ObjectiveSpec::Kind::external;
    else
        throw ParseError("unknown objective kind '" + kind + "'");

    spec.direction = spec.kind == ObjectiveSpec::Kind::nk ? Direction::maximize
                                                          : Direction::minimize;
    if (j.contains("direction")) spec.direction = direction_from_string(j.at("direction"));
    if (j.contains("samples")) spec.samples = j.at("samples").get<std::uint32_t>();
    if (spec.samples < 1) throw ParseError("objective samples must be >= 1");

    switch (spec.kind) {
    case ObjectiveSpec::Kind::nk:
        spec.landscape_path = j.at("landscape").get<std::string>();
        break;
    case ObjectiveSpec::Kind::surrogate:
        if (j.contains("noise_sd")) spec.surrogate.noise_sd = j.at("noise_sd").get<double>();
        if (j.contains("offset")) spec.surrogate.offset = j.at("offset").get<double>();
        if (j.contains("scale")) spec.surrogate.scale = j.at("scale").get<double>();
        if (j.contains("ripple")) spec.surrogate.ripple = j.at("ripple").get<double>();
        if (j.contains("ripple_freq"))
            spec.surrogate.ripple_freq = j.at("ripple_freq").get<double>();
        if (j.contains("coupling")) spec.surrogate.coupling = j.at("coupling").get<double>();
        if (j.contains("coupling_freq"))
            spec.surrogate.coupling_freq = j.at("coupling_freq").get<double>();
        if (j.contains("optimum"))
            spec.surrogate.optimum = j.at("optimum").get<std::vector<double>>();
        if (j.contains("seed")) spec.surrogate_seed = j.at("seed").get<std::uint64_t>();
        break;
    case ObjectiveSpec::Kind::external:
        spec.command = j.at("command").get<std::vector<std::string>>();
        if (spec.command.empty()) throw ParseError("external objective: empty command");
        if (j.contains("timeout_ms"))
            spec.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<std::int64_t>());
        break;
    }
    return spec;
}

inline json objective_to_json(const ObjectiveSpec& spec) {
    json j;
    j["direction"] = hdea::to_string(spec.direction);
    j["samples"] = spec.samples;
    switch (spec.kind) {
    case ObjectiveSpec::Kind::nk:
        j["kind"] = "nk";
        j["landscape"] = spec.landscape_path;
        break;
    case ObjectiveSpec::Kind::surrogate:
        j["kind"] = "surrogate";
        j["noise_sd"] = spec.surrogate.noise_sd;
        j["offset"] = spec.surrogate.offset;
        j["scale"] = spec.surrogate.scale;
        j["ripple"] = spec.surrogate.ripple;
        j["ripple_freq"] = spec.surrogate.ripple_freq;
        j["coupling"] = spec.surrogate.coupling;
        j["coupling_freq"] = spec.surrogate.coupling_freq;
        j["optimum"] = spec.surrogate.optimum;
        if (spec.surrogate_seed) j["seed"] = *spec.surrogate_seed;
        break;
    case ObjectiveSpec::Kind::external:
        j["kind"] = "external";
        j["command"] = spec.command;
        j["timeout_ms"] = spec.timeout.count();
        break;
    }
    return j;
}

// ---- single-run config -------------------------------------------------------

struct GenomeSpec {
    enum class Kind { bits, real };
    Kind kind = Kind::bits;
    std::size_t length = 0;   // bits
    SearchSpace space;        // real
};

inline GenomeSpec genome_from_json(const json& j) {
    GenomeSpec g;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "bits") {
        g.kind = GenomeSpec::Kind::bits;
        g.length = j.at("length").get<std::size_t>();
        if (g.length == 0) throw ParseError("bit genome length must be positive");
    } else if (kind == "real") {
        g.kind = GenomeSpec::Kind::real;
        g.space = space_from_json(j.at("space"));
    } else {
        throw ParseError("unknown genome kind '" + kind + "'");
    }
    return g;
}

inline json genome_to_json(const GenomeSpec& g) {
    if (g.kind == GenomeSpec::Kind::bits) return json{{"kind", "bits"}, {"length", g.length}};
    return json{{"kind", "real"}, {"space", space_to_json(g.space)}};
}

struct RunConfig {
    EAConfig ea;
    GenomeSpec genome;
    ObjectiveSpec objective;
};

inline RunConfig run_from_json(const json& j) {
    RunConfig cfg;
    cfg.ea.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    cfg.ea.population_size = j.at("population_size").get<std::uint32_t>();
    if (j.contains("tournament_size"))
        cfg.ea.tournament_size = j.at("tournament_size").get<std::uint32_t>();
    cfg.ea.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("replacement"))
        cfg.ea.replacement = replacement_from_string(j.at("replacement"));
    cfg.ea.run_seed = j.at("run_seed").get<std::uint64_t>();
    if (j.contains("init_seed")) cfg.ea.init_seed = j.at("init_seed").get<std::uint64_t>();
    if (j.contains("variation")) cfg.ea.variation = variation_from_json(j.at("variation"));
    cfg.ea.validate();
    cfg.genome = genome_from_json(j.at("genome"));
    cfg.objective = objective_from_json(j.at("objective"));
    return cfg;
}

inline json run_to_json(const RunConfig& cfg) {
    json j;
    j["algorithm"] = hdea::to_string(cfg.ea.algorithm);
    j["population_size"] = cfg.ea.population_size;
    j["tournament_size"] = cfg.ea.tournament_size;
    j["budget"] = cfg.ea.budget;
    j["replacement"] = hdea::to_string(cfg.ea.replacement);
    j["run_seed"] = cfg.ea.run_seed;
    if (cfg.ea.init_seed) j["init_seed"] = *cfg.ea.init_seed;
    j["variation"] = variation_to_json(cfg.ea.variation);
    j["genome"] = genome_to_json(cfg.genome);
    j["objective"] = objective_to_json(cfg.objective);
    return j;
}

inline json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
}

} // namespace hdea::config
