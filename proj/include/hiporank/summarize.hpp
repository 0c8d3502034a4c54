#pragma once

#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>
#include <hiporank/graph.hpp>
#include <hiporank/parallel.hpp>
#include <hiporank/rank.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace hiporank {

/// What happens to the sentence that crosses the word limit.
enum class BudgetMode {
    inclusive,  // keep it: stop once the running total reaches L
    strict,     // drop it: never exceed L
};

inline BudgetMode parse_budget_mode(const std::string& s) {
    if (s == "inclusive") return BudgetMode::inclusive;
    if (s == "strict") return BudgetMode::strict;
    throw Error("unknown budget mode '" + s + "'");
}

struct ScoredSummary {
    std::string article_id;
    std::vector<SentenceRef> picks;       // document order
    std::vector<std::string> texts;       // aligned to picks
    std::vector<double> scores;           // aligned to picks
    std::vector<std::size_t> pick_order;  // indices into picks, in selection order
    std::size_t total_tokens = 0;
};

namespace detail {

inline ScoredSummary assemble(const Document& doc, std::vector<std::pair<SentenceRef, double>> chosen) {
    ScoredSummary out;
    out.article_id = doc.article_id;
    std::vector<std::size_t> order(chosen.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return chosen[a].first < chosen[b].first; });
    out.pick_order.resize(chosen.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& [ref, score] = chosen[order[k]];
        out.picks.push_back(ref);
        out.texts.push_back(doc.at(ref).text);
        out.scores.push_back(score);
        out.total_tokens += doc.at(ref).token_count;
        out.pick_order[order[k]] = k;
    }
    return out;
}

}  // namespace detail

/// Greedy word-budget selection: highest combined score first (ties to the
/// earlier position), stopping after the pick that brings the total to at
/// least `word_limit`. Output is reordered into document order.
inline ScoredSummary select(const std::vector<SentenceScore>& scores, const Document& doc, std::size_t word_limit,
                            BudgetMode mode = BudgetMode::inclusive) {
    if (scores.size() != doc.sentence_count())
        throw Error(doc.article_id + ": " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(doc.sentence_count()) + " sentences");
    std::vector<std::size_t> ranked(scores.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    auto key = [&](std::size_t k) { return std::isnan(scores[k].combined) ? -INFINITY : scores[k].combined; };
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        if (key(a) != key(b)) return key(a) > key(b);
        return scores[a].ref() < scores[b].ref();
    });

    std::vector<std::pair<SentenceRef, double>> chosen;
    std::size_t total = 0;
    for (auto k : ranked) {
        if (total >= word_limit) break;
        const auto ref = scores[k].ref();
        const std::size_t len = doc.at(ref).token_count;
        if (mode == BudgetMode::strict && total + len > word_limit) break;
        chosen.emplace_back(ref, scores[k].combined);
        total += len;
    }
    return detail::assemble(doc, std::move(chosen));
}

inline ScoredSummary summarize_document(const Document& doc, const EmbeddingProvider& provider, const RankConfig& cfg,
                                        BudgetMode mode = BudgetMode::inclusive,
                                        std::vector<SentenceScore>* scores_out = nullptr) {
    const auto es = embed_document(doc, provider);
    auto scores = rank_document(doc, es, cfg);
    auto summary = select(scores, doc, cfg.word_limit, mode);
    if (scores_out) *scores_out = std::move(scores);
    return summary;
}

/// {"article_id", "summary", "picks", "scores", "total_tokens"}
inline nlohmann::json summary_to_json(const ScoredSummary& s) {
    nlohmann::json picks = nlohmann::json::array();
    for (auto r : s.picks) picks.push_back({r.section, r.sentence});
    return {{"article_id", s.article_id},
            {"summary", s.texts},
            {"picks", std::move(picks)},
            {"scores", s.scores},
            {"total_tokens", s.total_tokens}};
}

inline ScoredSummary summary_from_json(const nlohmann::json& j) {
    ScoredSummary s;
    try {
        s.article_id = j.at("article_id").get<std::string>();
        s.texts = j.at("summary").get<std::vector<std::string>>();
        if (j.contains("picks"))
            for (const auto& p : j.at("picks")) s.picks.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()});
        if (j.contains("scores")) s.scores = j.at("scores").get<std::vector<double>>();
        if (j.contains("total_tokens"))
            s.total_tokens = j.at("total_tokens").get<std::size_t>();
        else
            for (const auto& t : s.texts) s.total_tokens += count_whitespace_tokens(t);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("summary record: ") + e.what());
    }
    s.pick_order.resize(s.picks.size());
    std::iota(s.pick_order.begin(), s.pick_order.end(), 0);
    return s;
}

inline std::vector<ScoredSummary> read_summaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open summaries file: " + path);
    std::vector<ScoredSummary> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(summary_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

struct SummarizeOptions {
    BudgetMode budget = BudgetMode::inclusive;
    std::size_t workers = 1;
    bool strict = false;  // a failing document aborts the run
    WarningSink on_warning;
};

struct DocumentResult {
    std::optional<ScoredSummary> summary;
    std::vector<SentenceScore> scores;
    std::string error;  // set when the document failed
};

/// embed -> graph -> centrality -> select for each document; results keep
/// input order regardless of worker count.
inline std::vector<DocumentResult> summarize_corpus(const std::vector<Document>& docs, const EmbeddingProvider& provider,
                                                    const RankConfig& cfg, const SummarizeOptions& options = {}) {
    std::vector<DocumentResult> results(docs.size());
    parallel_for(docs.size(), options.workers, [&](std::size_t k) {
        auto& r = results[k];
        try {
            r.summary = summarize_document(docs[k], provider, cfg, options.budget, &r.scores);
        } catch (const std::exception& e) {
            r.error = docs[k].article_id + ": " + e.what();
        }
    });
    for (const auto& r : results) {
        if (r.error.empty()) continue;
        if (options.strict) throw Error(r.error);
        warn(options.on_warning, "skipping document " + r.error);
    }
    return results;
}

}  // namespace hiporank
