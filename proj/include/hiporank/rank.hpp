#pragma once

#include <hiporank/graph.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <vector>

namespace hiporank {

struct SentenceScore {
    std::size_t section_index = 0;
    std::size_t sentence_index = 0;
    double intra = 0.0;
    double inter = 0.0;
    double combined = 0.0;

    SentenceRef ref() const { return {section_index, sentence_index}; }
};

inline double combine(double intra, double inter, const RankConfig& cfg) {
    switch (cfg.hierarchy) {
        case Hierarchy::add: return cfg.mu1 * inter + intra;
        case Hierarchy::multiply: return cfg.mu1 * inter * intra;
        case Hierarchy::none: return intra;
    }
    return intra;
}

/// Degree-style centrality: each sentence averages its incoming edge weights,
/// separately over sentence neighbours (intra) and section nodes (inter).
/// Scores come back in document order.
inline std::vector<SentenceScore> centrality(const DocumentGraph& g, const RankConfig& cfg) {
    auto denominator = [&](std::size_t group) {
        const std::size_t d = cfg.norm == Normalization::neighbors ? (group > 0 ? group - 1 : 0) : group;
        return static_cast<double>(std::max<std::size_t>(d, 1));
    };

    std::vector<std::size_t> offsets(g.sentence_counts.size() + 1, 0);
    for (std::size_t s = 0; s < g.sentence_counts.size(); ++s) offsets[s + 1] = offsets[s] + g.sentence_counts[s];
    const std::size_t total = offsets.back();

    std::vector<double> intra(total, 0.0);
    std::vector<double> inter(total, 0.0);
    for (const auto& e : g.intra_edges) intra[g.flat ? e.to : offsets[e.section] + e.to] += e.weight;
    for (const auto& e : g.inter_edges) inter[offsets[e.to_section] + e.to_sentence] += e.weight;

    std::vector<SentenceScore> out;
    out.reserve(total);
    for (std::size_t s = 0; s < g.sentence_counts.size(); ++s) {
        const double intra_den = denominator(g.flat ? total : g.sentence_counts[s]);
        const double inter_den = denominator(g.section_count);
        for (std::size_t i = 0; i < g.sentence_counts[s]; ++i) {
            const std::size_t k = offsets[s] + i;
            SentenceScore sc;
            sc.section_index = s;
            sc.sentence_index = i;
            sc.intra = intra[k] / intra_den;
            sc.inter = g.flat ? 0.0 : inter[k] / inter_den;
            sc.combined = combine(sc.intra, sc.inter, cfg);
            out.push_back(sc);
        }
    }
    return out;
}

inline std::vector<SentenceScore> rank_document(const Document& doc, const EmbeddingSet& es, const RankConfig& cfg) {
    return centrality(build_graph(doc, es, cfg), cfg);
}

inline nlohmann::json scores_to_json(const std::string& article_id, const std::vector<SentenceScore>& scores) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : scores)
        rows.push_back({{"section", s.section_index},
                        {"sentence", s.sentence_index},
                        {"intra", s.intra},
                        {"inter", s.inter},
                        {"combined", s.combined}});
    return {{"article_id", article_id}, {"scores", std::move(rows)}};
}

}  // namespace hiporank
