#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdea/error.hpp"
#include "hdea/genome.hpp"
#include "hdea/rng.hpp"

// NK fitness landscapes: N binary genes, each epistatically coupled to K
// random other genes. Each gene carries a table of 2^(K+1) random fitness
// entries in [0,1]; genome fitness is the mean of the per-gene contributions.
//
// Table indexing convention (shared by evaluate and brute_force_optimum, and
// fixed by the file format): the gene's own allele is the HIGH-order bit,
// followed by the neighbor alleles in stored neighbor order, i.e.
//   index = g[i];  for nb in neighbors[i]: index = (index << 1) | g[nb];
//
// Generation draw order (fixes the landscape for a given (n,k,seed)): for each
// gene in ascending order, first its K neighbors via a partial Fisher-Yates
// shuffle of the other gene indices in ascending order, then its 2^(K+1)
// table entries as consecutive uniform doubles.

namespace hdea::nk {

struct Landscape {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint32_t>> neighbors; // [n][k], distinct, never self
    std::vector<std::vector<double>> tables;           // [n][2^(k+1)], entries in [0,1]

    bool operator==(const Landscape&) const = default;

    std::size_t table_size() const noexcept { return std::size_t{1} << (k + 1); }
};

inline Landscape generate(std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
    if (n < 1) throw ParameterError("nk: n must be >= 1");
    if (k + 1 > n) throw ParameterError("nk: k must satisfy 0 <= k <= n-1");
    if (k > 30) throw ParameterError("nk: k too large, table would not fit memory");

    Landscape land;
    land.n = n;
    land.k = k;
    land.seed = seed;
    land.neighbors.resize(n);
    land.tables.resize(n);

    Rng rng(seed);
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t gene = 0; gene < n; ++gene) {
        candidates.clear();
        for (std::uint32_t j = 0; j < n; ++j)
            if (j != gene) candidates.push_back(j);
        auto& nbrs = land.neighbors[gene];
        nbrs.resize(k);
        for (std::uint32_t j = 0; j < k; ++j) {
            const auto pick = j + rng.uniform_index(candidates.size() - j);
            std::swap(candidates[j], candidates[pick]);
            nbrs[j] = candidates[j];
        }
        auto& table = land.tables[gene];
        table.resize(land.table_size());
        for (auto& entry : table) entry = rng.uniform_double();
    }
    return land;
}

inline double evaluate(const Landscape& land, const BitGenome& g) {
    if (g.size() != land.n)
        throw RepresentationError("nk: genome length " + std::to_string(g.size()) +
                                  " does not match landscape n=" + std::to_string(land.n));
    double sum = 0.0;
    for (std::uint32_t gene = 0; gene < land.n; ++gene) {
        std::size_t index = g.bits[gene];
        for (const auto nb : land.neighbors[gene]) index = (index << 1) | g.bits[nb];
        sum += land.tables[gene][index];
    }
    return sum / static_cast<double>(land.n);
}

// Exhaustive enumeration over all 2^n genomes, n <= 24. Genomes are visited in
// lexicographic order (bit 0 most significant), and only strictly better
// fitness replaces the incumbent, so the lexicographically smallest optimum
// is returned.
inline std::pair<BitGenome, double> brute_force_optimum(const Landscape& land) {
    if (land.n > 24)
        throw ParameterError("nk: refusing exhaustive enumeration for n=" +
                             std::to_string(land.n) + " (limit 24)");
    const std::uint32_t n = land.n;
    BitGenome g;
    g.bits.resize(n);
    BitGenome best;
    double best_fitness = -1.0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < total; ++code) {
        for (std::uint32_t i = 0; i < n; ++i)
            g.bits[i] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1u);
        const double f = evaluate(land, g);
        if (f > best_fitness) {
            best_fitness = f;
            best = g;
        }
    }
    return {std::move(best), best_fitness};
}

// ---------------------------------------------------------------------------
// Serialization: line-oriented text, LF endings, full-precision doubles
// (shortest round-trip form). Schema:
//
//   nkl 1
//   n <N>
//   k <K>
//   seed <seed>
//   neighbors <gene> <idx>...     (one line per gene, K indices)
//   table <gene> <v>...           (one line per gene, 2^(K+1) values)
//   end
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw ParameterError("double formatting failed");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view token, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad real value '" + std::string(token) + "'", line);
    return v;
}

inline std::uint64_t parse_u64(std::string_view token, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError("bad integer '" + std::string(token) + "'", line);
    return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

} // namespace detail

inline std::string serialize(const Landscape& land) {
    std::string out;
    out += "nkl 1\n";
    out += "n " + std::to_string(land.n) + "\n";
    out += "k " + std::to_string(land.k) + "\n";
    out += "seed " + std::to_string(land.seed) + "\n";
    for (std::uint32_t gene = 0; gene < land.n; ++gene) {
        out += "neighbors " + std::to_string(gene);
        for (auto nb : land.neighbors[gene]) out += " " + std::to_string(nb);
        out += "\n";
    }
    for (std::uint32_t gene = 0; gene < land.n; ++gene) {
        out += "table " + std::to_string(gene);
        for (double v : land.tables[gene]) out += " " + detail::format_double(v);
        out += "\n";
    }
    out += "end\n";
    return out;
}

inline Landscape deserialize(std::string_view text) {
    Landscape land;
    bool got_n = false, got_k = false, got_seed = false, got_end = false;
    std::vector<bool> got_neighbors, got_table;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        auto tokens = detail::split_ws(line);
        if (tokens.empty()) continue;
        if (got_end) throw ParseError("content after 'end'", line_no);

        const auto& tag = tokens[0];
        if (line_no == 1) {
            if (tag != "nkl" || tokens.size() != 2 || tokens[1] != "1")
                throw ParseError("expected header 'nkl 1'", line_no);
            continue;
        }
        if (tag == "n") {
            if (tokens.size() != 2) throw ParseError("expected 'n <value>'", line_no);
            land.n = static_cast<std::uint32_t>(detail::parse_u64(tokens[1], line_no));
            if (land.n < 1) throw ParseError("n must be >= 1", line_no);
            got_n = true;
        } else if (tag == "k") {
            if (tokens.size() != 2) throw ParseError("expected 'k <value>'", line_no);
            land.k = static_cast<std::uint32_t>(detail::parse_u64(tokens[1], line_no));
            got_k = true;
        } else if (tag == "seed") {
            if (tokens.size() != 2) throw ParseError("expected 'seed <value>'", line_no);
            land.seed = detail::parse_u64(tokens[1], line_no);
            got_seed = true;
        } else if (tag == "neighbors") {
            if (!got_n || !got_k) throw ParseError("'neighbors' before n and k", line_no);
            if (land.neighbors.empty()) {
                if (land.k + 1 > land.n) throw ParseError("k must be <= n-1", line_no);
                land.neighbors.resize(land.n);
                land.tables.resize(land.n);
                got_neighbors.assign(land.n, false);
                got_table.assign(land.n, false);
            }
            if (tokens.size() != 2 + land.k)
                throw ParseError("neighbors line must list exactly k=" + std::to_string(land.k) +
                                     " indices",
                                 line_no);
            const auto gene = detail::parse_u64(tokens[1], line_no);
            if (gene >= land.n) throw ParseError("gene index out of range", line_no);
            if (got_neighbors[gene]) throw ParseError("duplicate neighbors line", line_no);
            auto& nbrs = land.neighbors[gene];
            nbrs.reserve(land.k);
            for (std::size_t t = 2; t < tokens.size(); ++t) {
                const auto idx = detail::parse_u64(tokens[t], line_no);
                if (idx >= land.n) throw ParseError("neighbor index out of range", line_no);
                if (idx == gene) throw ParseError("gene listed as its own neighbor", line_no);
                if (std::find(nbrs.begin(), nbrs.end(), idx) != nbrs.end())
                    throw ParseError("duplicate neighbor index", line_no);
                nbrs.push_back(static_cast<std::uint32_t>(idx));
            }
            got_neighbors[gene] = true;
        } else if (tag == "table") {
            if (land.neighbors.empty()) throw ParseError("'table' before 'neighbors'", line_no);
            if (tokens.size() < 2) throw ParseError("expected 'table <gene> <values>...'", line_no);
            const auto gene = detail::parse_u64(tokens[1], line_no);
            if (gene >= land.n) throw ParseError("gene index out of range", line_no);
            if (got_table[gene]) throw ParseError("duplicate table line", line_no);
            const std::size_t expect = std::size_t{1} << (land.k + 1);
            if (tokens.size() != 2 + expect)
                throw ParseError("table line must hold exactly 2^(k+1)=" + std::to_string(expect) +
                                     " values",
                                 line_no);
            auto& table = land.tables[gene];
            table.reserve(expect);
            for (std::size_t t = 2; t < tokens.size(); ++t) {
                const double v = detail::parse_double(tokens[t], line_no);
                if (!(v >= 0.0 && v <= 1.0))
                    throw ParseError("table entry outside [0,1]", line_no);
                table.push_back(v);
            }
            got_table[gene] = true;
        } else if (tag == "end") {
            got_end = true;
        } else {
            throw ParseError("unknown field '" + std::string(tag) + "'", line_no);
        }
    }

    if (!got_end) throw ParseError("missing 'end'", line_no);
    if (!got_n || !got_k || !got_seed) throw ParseError("missing n/k/seed header", line_no);
    if (got_neighbors.size() != land.n)
        throw ParseError("no neighbor lines for a landscape of n=" + std::to_string(land.n),
                         line_no);
    for (std::uint32_t gene = 0; gene < land.n; ++gene) {
        if (!got_neighbors[gene])
            throw ParseError("missing neighbors for gene " + std::to_string(gene), line_no);
        if (!got_table[gene])
            throw ParseError("missing table for gene " + std::to_string(gene), line_no);
    }
    return land;
}

} // namespace hdea::nk
