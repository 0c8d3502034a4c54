#pragma once

#include <hiporank/corpus.hpp>
#include <hiporank/rouge.hpp>
#include <hiporank/stemmer.hpp>
#include <hiporank/summarize.hpp>

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace hiporank {

struct RougeOptions {
    bool stem = false;
};

inline bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

/// Lowercase, split on whitespace, strip leading/trailing punctuation, drop
/// tokens that become empty; optionally Porter-stem.
inline std::vector<std::string> rouge_tokens(std::string_view text, const RougeOptions& opt = {}) {
    std::vector<std::string> out;
    for (auto piece : split_whitespace(text)) {
        while (!piece.empty() && is_ascii_punct(piece.front())) piece.remove_prefix(1);
        while (!piece.empty() && is_ascii_punct(piece.back())) piece.remove_suffix(1);
        if (piece.empty()) continue;
        auto token = to_lower(piece);
        out.push_back(opt.stem ? porter_stem(token) : std::move(token));
    }
    return out;
}

/// Tokens of several sentences, concatenated in the given order.
inline std::vector<std::string> rouge_tokens(const std::vector<std::string>& sentences, const RougeOptions& opt = {}) {
    std::vector<std::string> out;
    for (const auto& s : sentences) {
        auto t = rouge_tokens(s, opt);
        out.insert(out.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
    }
    return out;
}

struct RougeScores {
    PRF rouge1;
    PRF rouge2;
    PRF rougeL;
};

template <class T>
RougeScores rouge_scores(std::span<const T> candidate, std::span<const T> reference) {
    return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2), rouge_l(candidate, reference)};
}

inline RougeScores score_texts(const std::vector<std::string>& candidate_sentences,
                               const std::vector<std::string>& reference_sentences, const RougeOptions& opt = {}) {
    const auto c = rouge_tokens(candidate_sentences, opt);
    const auto r = rouge_tokens(reference_sentences, opt);
    return rouge_scores(std::span<const std::string>(c), std::span<const std::string>(r));
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// First sentences of the document until `token_budget` tokens are reached.
inline ScoredSummary lead_summary(const Document& doc, std::size_t token_budget) {
    if (token_budget == 0) throw Error("lead: token budget must be positive");
    std::vector<std::pair<SentenceRef, double>> chosen;
    std::size_t total = 0;
    for (auto ref : doc.positions()) {
        if (total >= token_budget) break;
        chosen.emplace_back(ref, 0.0);
        total += doc.at(ref).token_count;
    }
    return detail::assemble(doc, std::move(chosen));
}

/// Greedy extractive upper bound: repeatedly add the sentence that most
/// increases ROUGE-2 F1 of the (document-ordered) summary against the
/// reference; stop on no strictly positive gain or once the word limit is
/// reached. Scores hold the summary's ROUGE-2 F1 right after each pick.
inline ScoredSummary oracle_summary(const Document& doc, std::size_t word_limit, const RougeOptions& opt = {}) {
    if (doc.reference_summary.empty()) throw Error(doc.article_id + ": oracle needs a reference summary");

    TokenInterner interner;
    const auto reference = interner.ids(rouge_tokens(doc.reference_summary, opt));
    const auto refs = doc.positions();
    std::vector<std::vector<std::uint32_t>> sentence_tokens;
    for (auto ref : refs) sentence_tokens.push_back(interner.ids(rouge_tokens(doc.at(ref).text, opt)));

    std::vector<bool> taken(refs.size(), false);
    std::vector<std::pair<SentenceRef, double>> chosen;
    std::size_t total = 0;
    double current = 0.0;
    std::vector<std::uint32_t> candidate;
    while (total < word_limit) {
        std::size_t best = refs.size();
        double best_f1 = current;
        for (std::size_t k = 0; k < refs.size(); ++k) {
            if (taken[k]) continue;
            candidate.clear();
            for (std::size_t m = 0; m < refs.size(); ++m)
                if (taken[m] || m == k) candidate.insert(candidate.end(), sentence_tokens[m].begin(), sentence_tokens[m].end());
            const double f1 = rouge_n(std::span<const std::uint32_t>(candidate), std::span<const std::uint32_t>(reference), 2).f1;
            if (f1 > best_f1) {
                best_f1 = f1;
                best = k;
            }
        }
        if (best == refs.size()) break;
        taken[best] = true;
        current = best_f1;
        chosen.emplace_back(refs[best], best_f1);
        total += doc.at(refs[best]).token_count;
    }
    return detail::assemble(doc, std::move(chosen));
}

// ---------------------------------------------------------------------------
// Corpus evaluation
// ---------------------------------------------------------------------------

struct DocumentEvaluation {
    std::string article_id;
    RougeScores scores;
};

struct EvaluationReport {
    RougeScores mean;  // arithmetic means of P, R and F1 over documents
    std::vector<DocumentEvaluation> per_document;
};

namespace detail {

inline void accumulate(PRF& sum, const PRF& x) {
    sum.precision += x.precision;
    sum.recall += x.recall;
    sum.f1 += x.f1;
}

inline void divide(PRF& p, double n) {
    p.precision /= n;
    p.recall /= n;
    p.f1 /= n;
}

}  // namespace detail

inline EvaluationReport aggregate(std::vector<DocumentEvaluation> per_document) {
    EvaluationReport report;
    for (const auto& d : per_document) {
        detail::accumulate(report.mean.rouge1, d.scores.rouge1);
        detail::accumulate(report.mean.rouge2, d.scores.rouge2);
        detail::accumulate(report.mean.rougeL, d.scores.rougeL);
    }
    if (!per_document.empty()) {
        const auto n = static_cast<double>(per_document.size());
        detail::divide(report.mean.rouge1, n);
        detail::divide(report.mean.rouge2, n);
        detail::divide(report.mean.rougeL, n);
    }
    report.per_document = std::move(per_document);
    return report;
}

/// Scores every system summary against the reference abstract of the document
/// with the same article_id. Throws listing every unmatched id.
inline EvaluationReport evaluate_corpus(const std::vector<ScoredSummary>& system, const std::vector<Document>& references,
                                        const RougeOptions& opt = {}) {
    std::unordered_map<std::string, const Document*> by_id;
    for (const auto& d : references) by_id.emplace(d.article_id, &d);

    std::vector<std::string> missing;
    for (const auto& s : system)
        if (!by_id.contains(s.article_id)) missing.push_back(s.article_id);
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " system summaries have no reference:";
        for (const auto& id : missing) msg += " " + id;
        throw Error(msg);
    }

    std::vector<DocumentEvaluation> per_document;
    per_document.reserve(system.size());
    for (const auto& s : system)
        per_document.push_back({s.article_id, score_texts(s.texts, by_id.at(s.article_id)->reference_summary, opt)});
    return aggregate(std::move(per_document));
}

/// Score on the reported scale: x100, two decimals.
inline double reported(double x) { return std::round(x * 10000.0) / 100.0; }

inline nlohmann::json to_json(const PRF& p) {
    return {{"f1", reported(p.f1)}, {"precision", reported(p.precision)}, {"recall", reported(p.recall)}};
}

inline nlohmann::json to_json(const RougeScores& s) {
    return {{"rouge1", to_json(s.rouge1)}, {"rouge2", to_json(s.rouge2)}, {"rougeL", to_json(s.rougeL)}};
}

/// {"aggregate": {...}, "documents": n, "per_document": [{"article_id", ...}]}
inline nlohmann::json report_to_json(const EvaluationReport& r) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : r.per_document) {
        auto j = to_json(d.scores);
        j["article_id"] = d.article_id;
        docs.push_back(std::move(j));
    }
    return {{"aggregate", to_json(r.mean)}, {"documents", r.per_document.size()}, {"per_document", std::move(docs)}};
}

inline std::string report_to_csv(const EvaluationReport& r) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "article_id,rouge1_p,rouge1_r,rouge1_f,rouge2_p,rouge2_r,rouge2_f,rougeL_p,rougeL_r,rougeL_f\n";
    auto row = [&](const std::string& id, const RougeScores& s) {
        out << id;
        for (const PRF* p : {&s.rouge1, &s.rouge2, &s.rougeL})
            out << ',' << reported(p->precision) << ',' << reported(p->recall) << ',' << reported(p->f1);
        out << '\n';
    };
    for (const auto& d : r.per_document) row(d.article_id, d.scores);
    row("__mean__", r.mean);
    return out.str();
}

}  // namespace hiporank
