#pragma once

// Brute-force recomputation of sentence centrality, written without any of the
// graph/rank machinery: similarities, boundary distances, edge branches and
// averages are all evaluated inline with nested loops. Meant for small
// documents as an independent check of the pipeline.

#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>
#include <hiporank/graph.hpp>
#include <hiporank/rank.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

namespace hiporank {

inline std::vector<SentenceScore> centrality_oracle(const Document& doc, const EmbeddingSet& es, const RankConfig& cfg) {
    auto naive_cos = [](const std::vector<double>& a, const std::vector<double>& b) {
        double ab = 0, aa = 0, bb = 0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            ab += a[k] * b[k];
            aa += a[k] * a[k];
            bb += b[k] * b[k];
        }
        if (aa == 0 || bb == 0) return 0.0;
        double c = ab / (std::sqrt(aa) * std::sqrt(bb));
        return c > 1 ? 1.0 : (c < -1 ? -1.0 : c);
    };
    auto dist = [&](double x, double n) {
        if (cfg.positional == Positional::lead) return x;
        if (cfg.positional == Positional::undirected) return 0.0;
        double to_end = cfg.alpha * (n - x);
        return x < to_end ? x : to_end;
    };
    auto edge = [&](double sim, double d_to, double d_from) {
        double w;
        if (cfg.positional == Positional::undirected)
            w = sim;
        else if (d_to >= d_from)
            w = cfg.lambda1 * sim;
        else
            w = cfg.lambda2 * sim;
        if (w < cfg.beta) w = 0;
        return w;
    };
    auto denom = [&](std::size_t group) {
        double d = cfg.norm == Normalization::neighbors ? double(group) - 1 : double(group);
        return d < 1 ? 1.0 : d;
    };

    const std::size_t N = doc.sections.size();
    std::vector<SentenceScore> out;

    if (cfg.hierarchy == Hierarchy::none) {
        std::vector<const std::vector<double>*> all;
        std::vector<std::pair<std::size_t, std::size_t>> where;
        for (std::size_t I = 0; I < N; ++I)
            for (std::size_t i = 0; i < doc.sections[I].sentences.size(); ++i) {
                all.push_back(&es.vectors[I][i]);
                where.push_back({I, i});
            }
        const double total = double(all.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            double sum = 0;
            for (std::size_t j = 0; j < all.size(); ++j) {
                if (j == i) continue;
                sum += edge(naive_cos(*all[j], *all[i]), dist(double(i), total), dist(double(j), total));
            }
            SentenceScore s;
            s.section_index = where[i].first;
            s.sentence_index = where[i].second;
            s.intra = sum / denom(all.size());
            s.inter = 0;
            s.combined = s.intra;
            out.push_back(s);
        }
        return out;
    }

    for (std::size_t I = 0; I < N; ++I) {
        const std::size_t n = doc.sections[I].sentences.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& vi = es.vectors[I][i];

            double intra_sum = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                intra_sum += edge(naive_cos(es.vectors[I][j], vi), dist(double(i), double(n)), dist(double(j), double(n)));
            }

            double inter_sum = 0;
            for (std::size_t J = 0; J < N; ++J) {
                if (J == I) continue;
                std::vector<double> centroid(es.dim, 0.0);
                for (const auto& v : es.vectors[J])
                    for (std::size_t k = 0; k < es.dim; ++k) centroid[k] += v[k];
                for (auto& c : centroid) c /= double(es.vectors[J].size());
                inter_sum += edge(naive_cos(centroid, vi), dist(double(I), double(N)), dist(double(J), double(N)));
            }

            SentenceScore s;
            s.section_index = I;
            s.sentence_index = i;
            s.intra = intra_sum / denom(n);
            s.inter = inter_sum / denom(N);
            if (cfg.hierarchy == Hierarchy::add)
                s.combined = cfg.mu1 * s.inter + s.intra;
            else
                s.combined = cfg.mu1 * s.inter * s.intra;
            out.push_back(s);
        }
    }
    return out;
}

}  // namespace hiporank
