#pragma once

#include <hiporank/common.hpp>
#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hiporank {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// How sentence/section position turns into edge direction.
enum class Positional {
    boundary,    // distance to the nearest boundary, min(x, alpha * (n - x))
    lead,        // distance from the start only
    undirected,  // no positional asymmetry; weight = similarity
};

/// How intra- and inter-section centrality combine.
enum class Hierarchy {
    add,       // mu1 * inter + intra
    multiply,  // mu1 * inter * intra
    none,      // flat sentence graph over the whole document
};

/// Denominators of the centrality averages.
enum class Normalization {
    neighbors,  // n_I - 1 and N - 1 (clamped to >= 1)
    size,       // n_I and N
};

inline const char* to_string(Positional p) {
    switch (p) {
        case Positional::boundary: return "boundary";
        case Positional::lead: return "lead";
        case Positional::undirected: return "undirected";
    }
    return "?";
}

inline const char* to_string(Hierarchy h) {
    switch (h) {
        case Hierarchy::add: return "add";
        case Hierarchy::multiply: return "multiply";
        case Hierarchy::none: return "none";
    }
    return "?";
}

inline const char* to_string(Normalization n) { return n == Normalization::neighbors ? "neighbors" : "size"; }

inline Positional parse_positional(const std::string& s) {
    if (s == "boundary") return Positional::boundary;
    if (s == "lead") return Positional::lead;
    if (s == "undirected") return Positional::undirected;
    throw Error("unknown positional function '" + s + "'");
}

inline Hierarchy parse_hierarchy(const std::string& s) {
    if (s == "add") return Hierarchy::add;
    if (s == "multiply") return Hierarchy::multiply;
    if (s == "none") return Hierarchy::none;
    throw Error("unknown hierarchy mode '" + s + "'");
}

inline Normalization parse_normalization(const std::string& s) {
    if (s == "neighbors") return Normalization::neighbors;
    if (s == "size") return Normalization::size;
    throw Error("unknown normalization '" + s + "'");
}

struct RankConfig {
    double alpha = 1.0;
    double lambda1 = 0.0;
    double lambda2 = 1.0;
    double beta = -std::numeric_limits<double>::infinity();  // pruning disabled
    double mu1 = 0.5;
    std::size_t word_limit = 203;
    Positional positional = Positional::boundary;
    Hierarchy hierarchy = Hierarchy::add;
    Normalization norm = Normalization::neighbors;

    /// Tuned PubMed setting.
    static RankConfig pubmed() { return {}; }

    /// Tuned arXiv setting.
    static RankConfig arxiv() {
        RankConfig c;
        c.mu1 = 1.0;
        c.word_limit = 220;
        return c;
    }

    void validate() const {
        if (!(alpha >= 0.0)) throw Error("alpha must be >= 0");
        if (!(mu1 > 0.0)) throw Error("mu1 must be > 0");
        if (word_limit == 0) throw Error("word limit must be positive");
        if (positional == Positional::boundary && !(lambda1 < lambda2))
            throw Error("lambda1 must be < lambda2 with the boundary positional function");
    }

    bool operator==(const RankConfig&) const = default;
};

inline nlohmann::json to_json(const RankConfig& c) {
    return {{"alpha", c.alpha},
            {"lambda1", c.lambda1},
            {"lambda2", c.lambda2},
            {"beta", std::isinf(c.beta) ? nlohmann::json(c.beta < 0 ? "-inf" : "inf") : nlohmann::json(c.beta)},
            {"mu1", c.mu1},
            {"word_limit", c.word_limit},
            {"positional", to_string(c.positional)},
            {"hierarchy", to_string(c.hierarchy)},
            {"norm", to_string(c.norm)}};
}

// ---------------------------------------------------------------------------
// Boundary functions and edge weights
// ---------------------------------------------------------------------------

/// Distance of the sentence at 0-indexed position x to the nearest boundary of
/// a section with n sentences; alpha scales the distance to the end.
inline double sentence_boundary(std::size_t x, std::size_t n, double alpha) {
    const double pos = static_cast<double>(x);
    return std::min(pos, alpha * (static_cast<double>(n) - pos));
}

/// Same shape over sections within a document of N sections.
inline double section_boundary(std::size_t x, std::size_t N, double alpha) {
    const double pos = static_cast<double>(x);
    return std::min(pos, alpha * (static_cast<double>(N) - pos));
}

/// Positional distance of element x in a group of n under the configured function.
inline double positional_distance(std::size_t x, std::size_t n, const RankConfig& cfg) {
    switch (cfg.positional) {
        case Positional::boundary: return sentence_boundary(x, n, cfg.alpha);
        case Positional::lead: return static_cast<double>(x);
        case Positional::undirected: return 0.0;
    }
    return 0.0;
}

inline double prune(double w, double beta) { return w < beta ? 0.0 : w; }

namespace detail {

// Edge into the target is up-weighted (lambda2) only when the target is
// strictly closer to the boundary; ties take lambda1.
inline double directed_weight(double sim, double d_target, double d_source, const RankConfig& cfg) {
    double w = sim;
    if (cfg.positional != Positional::undirected) w = (d_target < d_source ? cfg.lambda2 : cfg.lambda1) * sim;
    return prune(w, cfg.beta);
}

}  // namespace detail

/// Weight of the intra-section edge j -> i. db_i and db_j are the positional
/// distances of the target and source sentences.
inline double weight_intra(double sim, double db_i, double db_j, const RankConfig& cfg) {
    return detail::directed_weight(sim, db_i, db_j, cfg);
}

/// Weight of the inter-section edge from section J into a sentence of section I.
inline double weight_inter(double sim, double db_I, double db_J, const RankConfig& cfg) {
    return detail::directed_weight(sim, db_I, db_J, cfg);
}

// ---------------------------------------------------------------------------
// Similarities (config independent, so sweeps compute them once)
// ---------------------------------------------------------------------------

/// Dense row-major square matrix.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

struct DocumentSimilarities {
    std::string article_id;
    std::vector<std::size_t> section_sizes;
    std::vector<SquareMatrix> intra;                // per section, sentence x sentence
    std::vector<std::vector<double>> section_to_sentence;  // [J][global sentence]
    std::optional<SquareMatrix> flat;               // global sentence x sentence

    std::size_t sentence_count() const {
        std::size_t n = 0;
        for (auto s : section_sizes) n += s;
        return n;
    }
};

/// Cosines needed by build_graph. `with_flat` also fills the whole-document
/// matrix used by Hierarchy::none.
inline DocumentSimilarities compute_similarities(const Document& doc, const EmbeddingSet& es, bool with_flat) {
    check_alignment(es, doc);
    DocumentSimilarities sims;
    sims.article_id = doc.article_id;

    std::vector<const Vector*> rows;
    std::vector<double> norms;
    for (std::size_t s = 0; s < doc.section_count(); ++s) {
        sims.section_sizes.push_back(doc.sections[s].size());
        for (const auto& v : es.vectors[s]) {
            rows.push_back(&v);
            norms.push_back(norm(v));
        }
    }
    auto cos = [&](std::size_t a, std::size_t b) {
        if (norms[a] == 0.0 || norms[b] == 0.0) return 0.0;
        return std::clamp(dot(*rows[a], *rows[b]) / (norms[a] * norms[b]), -1.0, 1.0);
    };

    std::size_t offset = 0;
    for (auto n : sims.section_sizes) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = cos(offset + i, offset + j);
        sims.intra.push_back(std::move(m));
        offset += n;
    }

    const std::size_t total = rows.size();
    sims.section_to_sentence.assign(doc.section_count(), std::vector<double>(total, 0.0));
    for (std::size_t J = 0; J < doc.section_count(); ++J) {
        const auto sec = section_embedding(es, J);
        const double sn = norm(sec.vector);
        for (std::size_t g = 0; g < total; ++g)
            sims.section_to_sentence[J][g] =
                (sn == 0.0 || norms[g] == 0.0) ? 0.0 : std::clamp(dot(sec.vector, *rows[g]) / (sn * norms[g]), -1.0, 1.0);
    }

    if (with_flat) {
        SquareMatrix m(total);
        for (std::size_t i = 0; i < total; ++i)
            for (std::size_t j = i + 1; j < total; ++j) m(i, j) = m(j, i) = cos(i, j);
        sims.flat = std::move(m);
    }
    return sims;
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

/// Directed sentence -> sentence edge inside one group. In a flat graph the
/// single group is the whole document and indices are global positions.
struct IntraEdge {
    std::size_t section;
    std::size_t from;
    std::size_t to;
    double weight;
};

/// Edge from the node of section `from_section` into sentence (to_section, to_sentence).
struct InterEdge {
    std::size_t from_section;
    std::size_t to_section;
    std::size_t to_sentence;
    double weight;
};

struct DocumentGraph {
    std::string article_id;
    bool flat = false;
    std::vector<std::size_t> sentence_counts;  // per section of the source document
    std::size_t section_count = 0;
    std::vector<IntraEdge> intra_edges;
    std::vector<InterEdge> inter_edges;
};

/// Builds the directed graph from precomputed similarities.
inline DocumentGraph build_graph(const DocumentSimilarities& sims, const RankConfig& cfg) {
    DocumentGraph g;
    g.article_id = sims.article_id;
    g.sentence_counts = sims.section_sizes;
    g.section_count = sims.section_sizes.size();

    if (cfg.hierarchy == Hierarchy::none) {
        if (!sims.flat) throw Error(sims.article_id + ": flat graph needs whole-document similarities");
        g.flat = true;
        const std::size_t n = sims.flat->n;
        g.intra_edges.reserve(n * (n > 0 ? n - 1 : 0));
        for (std::size_t i = 0; i < n; ++i) {
            const double di = positional_distance(i, n, cfg);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                g.intra_edges.push_back({0, j, i, weight_intra((*sims.flat)(j, i), di, positional_distance(j, n, cfg), cfg)});
            }
        }
        return g;
    }

    for (std::size_t I = 0; I < g.section_count; ++I) {
        const std::size_t n = sims.section_sizes[I];
        const auto& m = sims.intra[I];
        for (std::size_t i = 0; i < n; ++i) {
            const double di = positional_distance(i, n, cfg);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                g.intra_edges.push_back({I, j, i, weight_intra(m(j, i), di, positional_distance(j, n, cfg), cfg)});
            }
        }
    }

    const std::size_t N = g.section_count;
    std::size_t offset = 0;
    for (std::size_t I = 0; I < N; ++I) {
        const double dI = positional_distance(I, N, cfg);
        for (std::size_t i = 0; i < sims.section_sizes[I]; ++i) {
            for (std::size_t J = 0; J < N; ++J) {
                if (J == I) continue;
                const double sim = sims.section_to_sentence[J][offset + i];
                g.inter_edges.push_back({J, I, i, weight_inter(sim, dI, positional_distance(J, N, cfg), cfg)});
            }
        }
        offset += sims.section_sizes[I];
    }
    return g;
}

inline DocumentGraph build_graph(const Document& doc, const EmbeddingSet& es, const RankConfig& cfg) {
    return build_graph(compute_similarities(doc, es, cfg.hierarchy == Hierarchy::none), cfg);
}

/// Debug dump: {"article_id", "flat", "sentence_counts", "intra_edges": [[sec, from, to, w]],
/// "inter_edges": [[from_sec, to_sec, to_sent, w]]}.
inline nlohmann::json graph_to_json(const DocumentGraph& g) {
    nlohmann::json intra = nlohmann::json::array();
    for (const auto& e : g.intra_edges) intra.push_back({e.section, e.from, e.to, e.weight});
    nlohmann::json inter = nlohmann::json::array();
    for (const auto& e : g.inter_edges) inter.push_back({e.from_section, e.to_section, e.to_sentence, e.weight});
    return {{"article_id", g.article_id},
            {"flat", g.flat},
            {"sentence_counts", g.sentence_counts},
            {"intra_edges", std::move(intra)},
            {"inter_edges", std::move(inter)}};
}

}  // namespace hiporank
