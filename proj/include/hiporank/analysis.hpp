#pragma once

#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>
#include <hiporank/eval.hpp>
#include <hiporank/graph.hpp>
#include <hiporank/parallel.hpp>
#include <hiporank/rank.hpp>
#include <hiporank/summarize.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace hiporank {

// ---------------------------------------------------------------------------
// Hyperparameter sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
    std::vector<double> lambda1{-0.2, 0.0, 0.5};
    std::vector<double> alpha{0.0, 0.5, 0.8, 1.0, 1.2};
    std::vector<double> mu1{0.5, 1.0, 1.5};
    std::vector<Positional> positional{Positional::lead, Positional::undirected, Positional::boundary};
    std::vector<Hierarchy> hierarchy{Hierarchy::none, Hierarchy::add, Hierarchy::multiply};
    std::vector<std::string> providers{"random:200:0"};
    RankConfig base;  // lambda2, beta, word_limit and norm come from here

    /// Full validation grid.
    static SweepSpec full_grid() { return {}; }

    /// Best setting with one component varied at a time: positional function
    /// under hierarchy-add, and hierarchy mode under the boundary function.
    /// The shared best point appears once.
    static SweepSpec ablation() {
        SweepSpec s;
        s.lambda1 = {s.base.lambda1};
        s.alpha = {s.base.alpha};
        s.mu1 = {s.base.mu1};
        s.ablation_only = true;
        return s;
    }

    bool ablation_only = false;  // keep only points differing from `base` in at most one of positional/hierarchy
};

/// Grid points in enumeration order (lambda1, alpha, mu1, positional,
/// hierarchy), dropping combinations that fail RankConfig::validate().
inline std::vector<RankConfig> enumerate_grid(const SweepSpec& spec) {
    std::vector<RankConfig> out;
    for (double l1 : spec.lambda1)
        for (double a : spec.alpha)
            for (double m : spec.mu1)
                for (auto p : spec.positional)
                    for (auto h : spec.hierarchy) {
                        RankConfig c = spec.base;
                        c.lambda1 = l1;
                        c.alpha = a;
                        c.mu1 = m;
                        c.positional = p;
                        c.hierarchy = h;
                        if (spec.ablation_only && c.positional != spec.base.positional &&
                            c.hierarchy != spec.base.hierarchy)
                            continue;
                        try {
                            c.validate();
                        } catch (const Error&) {
                            continue;
                        }
                        out.push_back(c);
                    }
    return out;
}

struct SweepRow {
    std::string provider;
    RankConfig config;
    std::size_t documents = 0;
    double rouge1 = 0.0;  // mean F1, x100
    double rouge2 = 0.0;
    double rougeL = 0.0;
    std::string status = "ok";
};

struct SweepOptions {
    std::size_t workers = 1;
    RougeOptions rouge;
    BudgetMode budget = BudgetMode::inclusive;
    std::uint64_t default_seed = 0;
    WarningSink on_warning;
};

namespace detail {

struct PreparedDocument {
    const Document* doc = nullptr;
    DocumentSimilarities sims;
    std::vector<std::vector<std::uint32_t>> sentence_tokens;  // document order
    std::vector<std::uint32_t> reference;
    std::vector<std::size_t> offsets;  // first global index of each section
};

inline PreparedDocument prepare(const Document& doc, const EmbeddingProvider& provider, bool with_flat,
                                const RougeOptions& rouge) {
    PreparedDocument p;
    p.doc = &doc;
    p.sims = compute_similarities(doc, embed_document(doc, provider), with_flat);
    TokenInterner interner;
    p.reference = interner.ids(rouge_tokens(doc.reference_summary, rouge));
    std::size_t offset = 0;
    for (const auto& sec : doc.sections) {
        p.offsets.push_back(offset);
        offset += sec.size();
        for (const auto& s : sec.sentences) p.sentence_tokens.push_back(interner.ids(rouge_tokens(s.text, rouge)));
    }
    return p;
}

inline RougeScores score_prepared(const PreparedDocument& p, const RankConfig& cfg, BudgetMode budget) {
    const auto summary = select(centrality(build_graph(p.sims, cfg), cfg), *p.doc, cfg.word_limit, budget);
    std::vector<std::uint32_t> candidate;
    for (auto ref : summary.picks) {
        const auto& t = p.sentence_tokens[p.offsets[ref.section] + ref.sentence];
        candidate.insert(candidate.end(), t.begin(), t.end());
    }
    return rouge_scores(std::span<const std::uint32_t>(candidate), std::span<const std::uint32_t>(p.reference));
}

}  // namespace detail

/// Evaluates every (provider, grid point) on the corpus. Rows come back
/// sorted by ROUGE-L descending; ties keep enumeration order.
inline std::vector<SweepRow> run_sweep(const std::vector<Document>& corpus, const SweepSpec& spec,
                                       const SweepOptions& options = {}) {
    const auto grid = enumerate_grid(spec);
    const bool with_flat = std::any_of(grid.begin(), grid.end(), [](const RankConfig& c) { return c.hierarchy == Hierarchy::none; });

    std::vector<SweepRow> rows;
    for (const auto& provider_text : spec.providers) {
        std::vector<detail::PreparedDocument> prepared;
        std::string provider_error;
        try {
            auto provider = make_provider(parse_provider_spec(provider_text), &corpus, options.default_seed, options.on_warning);
            std::vector<std::optional<detail::PreparedDocument>> slots(corpus.size());
            std::mutex warn_mutex;
            parallel_for(corpus.size(), options.workers, [&](std::size_t k) {
                if (corpus[k].reference_summary.empty()) return;
                try {
                    slots[k] = detail::prepare(corpus[k], *provider, with_flat, options.rouge);
                } catch (const std::exception& e) {
                    std::lock_guard lock(warn_mutex);
                    warn(options.on_warning, provider_text + ": skipping " + corpus[k].article_id + ": " + e.what());
                }
            });
            for (auto& s : slots)
                if (s) prepared.push_back(std::move(*s));
        } catch (const std::exception& e) {
            provider_error = e.what();
        }

        const std::size_t first = rows.size();
        rows.resize(first + grid.size());
        parallel_for(grid.size(), options.workers, [&](std::size_t g) {
            SweepRow& row = rows[first + g];
            row.provider = provider_text;
            row.config = grid[g];
            if (!provider_error.empty()) {
                row.status = "error: " + provider_error;
                return;
            }
            try {
                double r1 = 0, r2 = 0, rl = 0;
                for (const auto& p : prepared) {
                    const auto s = detail::score_prepared(p, grid[g], options.budget);
                    r1 += s.rouge1.f1;
                    r2 += s.rouge2.f1;
                    rl += s.rougeL.f1;
                }
                row.documents = prepared.size();
                if (row.documents == 0) {
                    row.status = "error: no evaluable documents";
                    return;
                }
                const double n = static_cast<double>(row.documents);
                row.rouge1 = reported(r1 / n);
                row.rouge2 = reported(r2 / n);
                row.rougeL = reported(rl / n);
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
        });
    }

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        const bool a_ok = a.status == "ok";
        const bool b_ok = b.status == "ok";
        if (a_ok != b_ok) return a_ok;
        return a.rougeL > b.rougeL;
    });
    return rows;
}

inline std::string format_number(double x) {
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    std::ostringstream s;
    s << x;
    return s.str();
}

/// Columns (v1): provider,positional,hierarchy,lambda1,lambda2,alpha,mu1,beta,
/// word_limit,norm,documents,rouge1,rouge2,rougeL,status
inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "provider,positional,hierarchy,lambda1,lambda2,alpha,mu1,beta,word_limit,norm,documents,rouge1,rouge2,rougeL,status\n";
    for (const auto& r : rows) {
        const auto& c = r.config;
        std::ostringstream scores;
        scores << std::fixed << std::setprecision(2) << r.rouge1 << ',' << r.rouge2 << ',' << r.rougeL;
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << r.provider << ',' << to_string(c.positional) << ',' << to_string(c.hierarchy) << ','
            << format_number(c.lambda1) << ',' << format_number(c.lambda2) << ',' << format_number(c.alpha) << ','
            << format_number(c.mu1) << ',' << format_number(c.beta) << ',' << c.word_limit << ','
            << to_string(c.norm) << ',' << r.documents << ',' << scores.str() << ',' << status << '\n';
    }
    return out.str();
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"provider", r.provider},
                       {"config", to_json(r.config)},
                       {"documents", r.documents},
                       {"rouge1", r.rouge1},
                       {"rouge2", r.rouge2},
                       {"rougeL", r.rougeL},
                       {"status", r.status}});
    return {{"rows", std::move(out)}, {"grid_points", rows.size()}};
}

// ---------------------------------------------------------------------------
// Sentence-position distributions
// ---------------------------------------------------------------------------

struct PositionRow {
    std::size_t doc_rank = 0;  // 0 = shortest document
    std::string article_id;
    std::size_t doc_tokens = 0;
    std::size_t doc_sentences = 0;
    std::vector<double> relative_positions;  // global index / sentence count, per pick
    std::vector<std::size_t> counts;         // per bin
    std::vector<double> density;             // counts / picks
};

struct PositionGrid {
    std::size_t bins = 0;
    std::vector<PositionRow> rows;

    /// Bin counts summed over all documents.
    std::vector<std::size_t> pooled_counts() const {
        std::vector<std::size_t> out(bins, 0);
        for (const auto& r : rows)
            for (std::size_t b = 0; b < bins; ++b) out[b] += r.counts[b];
        return out;
    }
};

namespace detail {

// Summaries read back from disk may lack picks; recover them from the texts.
inline std::vector<SentenceRef> resolve_picks(const ScoredSummary& s, const Document& doc) {
    if (!s.picks.empty() || s.texts.empty()) return s.picks;
    std::vector<SentenceRef> out;
    std::vector<bool> used(doc.sentence_count(), false);
    const auto refs = doc.positions();
    for (const auto& text : s.texts) {
        for (std::size_t k = 0; k < refs.size(); ++k) {
            if (!used[k] && doc.at(refs[k]).text == text) {
                used[k] = true;
                out.push_back(refs[k]);
                break;
            }
        }
    }
    return out;
}

}  // namespace detail

inline PositionGrid position_histogram(const std::vector<ScoredSummary>& summaries, const std::vector<Document>& corpus,
                                       std::size_t bins) {
    if (bins == 0) throw Error("position histogram needs at least one bin");
    std::unordered_map<std::string, const Document*> by_id;
    for (const auto& d : corpus) by_id.emplace(d.article_id, &d);

    PositionGrid grid;
    grid.bins = bins;
    for (const auto& s : summaries) {
        auto it = by_id.find(s.article_id);
        if (it == by_id.end()) throw Error("no document for summary '" + s.article_id + "'");
        const Document& doc = *it->second;

        std::vector<std::size_t> offsets;
        std::size_t offset = 0;
        for (const auto& sec : doc.sections) {
            offsets.push_back(offset);
            offset += sec.size();
        }

        PositionRow row;
        row.article_id = s.article_id;
        row.doc_tokens = doc.token_count();
        row.doc_sentences = doc.sentence_count();
        row.counts.assign(bins, 0);
        for (auto ref : detail::resolve_picks(s, doc)) {
            const double rel = static_cast<double>(offsets.at(ref.section) + ref.sentence) /
                               static_cast<double>(row.doc_sentences);
            row.relative_positions.push_back(rel);
            const auto b = std::min(bins - 1, static_cast<std::size_t>(rel * static_cast<double>(bins)));
            ++row.counts[b];
        }
        const double picks = static_cast<double>(row.relative_positions.size());
        for (auto c : row.counts) row.density.push_back(picks > 0 ? static_cast<double>(c) / picks : 0.0);
        grid.rows.push_back(std::move(row));
    }
    std::stable_sort(grid.rows.begin(), grid.rows.end(), [](const PositionRow& a, const PositionRow& b) {
        return a.doc_tokens < b.doc_tokens;
    });
    for (std::size_t k = 0; k < grid.rows.size(); ++k) grid.rows[k].doc_rank = k;
    return grid;
}

/// Columns (v1): doc_rank,article_id,doc_tokens,doc_sentences,bin,bin_start,bin_end,count,density
inline std::string positions_to_csv(const PositionGrid& grid) {
    std::ostringstream out;
    out << "doc_rank,article_id,doc_tokens,doc_sentences,bin,bin_start,bin_end,count,density\n";
    for (const auto& r : grid.rows)
        for (std::size_t b = 0; b < grid.bins; ++b) {
            const double lo = static_cast<double>(b) / static_cast<double>(grid.bins);
            const double hi = static_cast<double>(b + 1) / static_cast<double>(grid.bins);
            out << r.doc_rank << ',' << r.article_id << ',' << r.doc_tokens << ',' << r.doc_sentences << ',' << b << ','
                << lo << ',' << hi << ',' << r.counts[b] << ',' << r.density[b] << '\n';
        }
    return out.str();
}

}  // namespace hiporank
