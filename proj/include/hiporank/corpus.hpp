#pragma once

// Sectioned documents in the PubMed/arXiv JSONL layout:
//   {"article_id": str, "abstract_text": [str], "sections": [[str]], "section_names": [str]}

#include <hiporank/common.hpp>

#include <json.hpp>

#include <cstddef>
#include <fstream>
#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

namespace hiporank {

struct Sentence {
    std::string text;
    std::size_t token_count = 0;
    std::size_t section_index = 0;
    std::size_t sentence_index = 0;

    bool operator==(const Sentence&) const = default;
};

struct Section {
    std::string name;
    std::vector<Sentence> sentences;
    std::size_t section_index = 0;

    std::size_t size() const { return sentences.size(); }
    bool operator==(const Section&) const = default;
};

struct Document {
    std::string article_id;
    std::vector<Section> sections;
    std::vector<std::string> reference_summary;

    std::size_t section_count() const { return sections.size(); }

    std::size_t sentence_count() const {
        std::size_t n = 0;
        for (const auto& s : sections) n += s.size();
        return n;
    }

    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& sec : sections)
            for (const auto& s : sec.sentences) n += s.token_count;
        return n;
    }

    std::size_t summary_token_count() const {
        std::size_t n = 0;
        for (const auto& s : reference_summary) n += count_whitespace_tokens(s);
        return n;
    }

    const Sentence& at(SentenceRef ref) const {
        return sections.at(ref.section).sentences.at(ref.sentence);
    }

    /// All sentence positions in reading order.
    std::vector<SentenceRef> positions() const {
        std::vector<SentenceRef> out;
        out.reserve(sentence_count());
        for (const auto& sec : sections)
            for (const auto& s : sec.sentences) out.push_back({s.section_index, s.sentence_index});
        return out;
    }

    bool operator==(const Document&) const = default;
};

inline Sentence make_sentence(std::string text, std::size_t section_index, std::size_t sentence_index) {
    Sentence s;
    s.token_count = count_whitespace_tokens(text);
    s.text = std::move(text);
    s.section_index = section_index;
    s.sentence_index = sentence_index;
    return s;
}

/// Removes XML-like markers such as "<S>" and "</S>" from an abstract sentence.
inline std::string strip_tags(const std::string& s) {
    static const std::regex tag("</?[A-Za-z][^<>]*>");
    return std::string(trim(std::regex_replace(s, tag, "")));
}

/// Builds a validated document from raw section lists. Empty sentences and
/// sections are dropped (with a warning); surviving sections are renumbered
/// contiguously. Throws FormatError when nothing survives.
inline Document make_document(std::string article_id,
                              const std::vector<std::vector<std::string>>& sections,
                              std::vector<std::string> section_names,
                              const std::vector<std::string>& abstract_text,
                              const WarningSink& on_warning = {}) {
    Document doc;
    doc.article_id = std::move(article_id);

    if (section_names.size() != sections.size()) {
        warn(on_warning, doc.article_id + ": " + std::to_string(section_names.size()) +
                             " section names for " + std::to_string(sections.size()) + " sections");
        section_names.resize(sections.size());
    }

    std::size_t dropped_sentences = 0;
    std::size_t dropped_sections = 0;
    for (std::size_t k = 0; k < sections.size(); ++k) {
        Section sec;
        sec.name = section_names[k];
        sec.section_index = doc.sections.size();
        for (const auto& raw : sections[k]) {
            if (trim(raw).empty()) {
                ++dropped_sentences;
                continue;
            }
            sec.sentences.push_back(make_sentence(raw, sec.section_index, sec.sentences.size()));
        }
        if (sec.sentences.empty()) {
            ++dropped_sections;
            continue;
        }
        doc.sections.push_back(std::move(sec));
    }
    if (dropped_sentences > 0)
        warn(on_warning, doc.article_id + ": dropped " + std::to_string(dropped_sentences) + " empty sentence(s)");
    if (dropped_sections > 0)
        warn(on_warning, doc.article_id + ": dropped " + std::to_string(dropped_sections) + " empty section(s)");
    if (doc.sections.empty()) throw FormatError(doc.article_id + ": document has no non-empty sentences");

    for (const auto& a : abstract_text) {
        auto cleaned = strip_tags(a);
        if (!cleaned.empty()) doc.reference_summary.push_back(std::move(cleaned));
    }
    return doc;
}

inline Document document_from_json(const nlohmann::json& j, const WarningSink& on_warning = {}) {
    if (!j.is_object()) throw FormatError("record is not a JSON object");
    if (!j.contains("article_id")) throw FormatError("record has no article_id");
    if (!j.contains("sections")) throw FormatError("record has no sections");

    std::string id = j.at("article_id").is_string() ? j.at("article_id").get<std::string>()
                                                     : j.at("article_id").dump();
    try {
        auto sections = j.at("sections").get<std::vector<std::vector<std::string>>>();
        std::vector<std::string> names;
        if (j.contains("section_names") && !j.at("section_names").is_null())
            names = j.at("section_names").get<std::vector<std::string>>();
        else
            names.resize(sections.size());
        std::vector<std::string> abstract;
        if (j.contains("abstract_text") && !j.at("abstract_text").is_null())
            abstract = j.at("abstract_text").get<std::vector<std::string>>();
        return make_document(std::move(id), sections, std::move(names), abstract, on_warning);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(id + ": " + e.what());
    }
}

inline nlohmann::json document_to_json(const Document& doc) {
    nlohmann::json sections = nlohmann::json::array();
    nlohmann::json names = nlohmann::json::array();
    for (const auto& sec : doc.sections) {
        nlohmann::json sents = nlohmann::json::array();
        for (const auto& s : sec.sentences) sents.push_back(s.text);
        sections.push_back(std::move(sents));
        names.push_back(sec.name);
    }
    return {{"article_id", doc.article_id},
            {"abstract_text", doc.reference_summary},
            {"sections", std::move(sections)},
            {"section_names", std::move(names)}};
}

struct ParseOptions {
    bool strict = false;
    std::optional<std::size_t> limit;
    WarningSink on_warning;
};

/// Streams documents from a JSONL file, one per line, in input order.
/// Lenient mode skips malformed lines and counts them; strict mode throws.
class CorpusReader {
public:
    explicit CorpusReader(const std::string& path, ParseOptions options = {})
        : path_(path), in_(path), options_(std::move(options)) {
        if (!in_) throw Error("cannot open corpus file: " + path);
    }

    std::optional<Document> next() {
        std::string line;
        while (!(options_.limit && produced_ >= *options_.limit) && std::getline(in_, line)) {
            ++line_number_;
            if (trim(line).empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                auto doc = document_from_json(j, options_.on_warning);
                ++produced_;
                return doc;
            } catch (const std::exception& e) {
                std::string msg = path_ + ":" + std::to_string(line_number_) + ": " + e.what();
                if (options_.strict) throw FormatError(msg);
                ++skipped_;
                warn(options_.on_warning, "skipping malformed line " + msg);
            }
        }
        if (in_.bad()) throw Error("read error on corpus file: " + path_);
        return std::nullopt;
    }

    std::size_t skipped() const { return skipped_; }
    std::size_t produced() const { return produced_; }
    std::size_t lines_read() const { return line_number_; }

private:
    std::string path_;
    std::ifstream in_;
    ParseOptions options_;
    std::size_t line_number_ = 0;
    std::size_t produced_ = 0;
    std::size_t skipped_ = 0;
};

struct ParseReport {
    std::size_t lines = 0;
    std::size_t documents = 0;
    std::size_t skipped = 0;
};

inline std::vector<Document> parse_corpus(const std::string& path, ParseOptions options = {},
                                          ParseReport* report = nullptr) {
    CorpusReader reader(path, std::move(options));
    std::vector<Document> docs;
    while (auto d = reader.next()) docs.push_back(std::move(*d));
    if (report) *report = {reader.lines_read(), reader.produced(), reader.skipped()};
    return docs;
}

struct CorpusStats {
    std::size_t documents = 0;
    double mean_document_tokens = 0.0;
    double mean_summary_tokens = 0.0;

    bool operator==(const CorpusStats&) const = default;
};

/// Running means, so statistics can be taken over a stream without holding it.
class StatsAccumulator {
public:
    void add(const Document& d) {
        ++count_;
        doc_tokens_ += d.token_count();
        summary_tokens_ += d.summary_token_count();
    }

    CorpusStats result() const {
        if (count_ == 0) throw Error("document_stats: empty corpus");
        const auto n = static_cast<double>(count_);
        return {count_, static_cast<double>(doc_tokens_) / n, static_cast<double>(summary_tokens_) / n};
    }

private:
    std::size_t count_ = 0;
    unsigned long long doc_tokens_ = 0;
    unsigned long long summary_tokens_ = 0;
};

inline CorpusStats document_stats(const std::vector<Document>& docs) {
    StatsAccumulator acc;
    for (const auto& d : docs) acc.add(d);
    return acc.result();
}

inline nlohmann::json to_json(const CorpusStats& s) {
    return {{"documents", s.documents},
            {"mean_document_tokens", s.mean_document_tokens},
            {"mean_summary_tokens", s.mean_summary_tokens}};
}

}  // namespace hiporank
