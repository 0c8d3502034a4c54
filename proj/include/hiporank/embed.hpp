#pragma once

#include <hiporank/common.hpp>
#include <hiporank/corpus.hpp>

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace hiporank {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Similarity
// ---------------------------------------------------------------------------

struct CosineResult {
    double value = 0.0;
    bool degenerate = false;  // one side had zero norm
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline bool is_zero(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; });
}

/// Cosine similarity with the zero-norm case mapped to 0 and flagged.
inline CosineResult cosine_checked(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error("cosine: length mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return {0.0, true};
    double c = dot(a, b) / (na * nb);
    return {std::clamp(c, -1.0, 1.0), false};
}

inline double cosine(std::span<const double> a, std::span<const double> b) { return cosine_checked(a, b).value; }

// ---------------------------------------------------------------------------
// Embedding sets
// ---------------------------------------------------------------------------

/// Per-sentence vectors laid out on the document's (section, sentence) grid.
struct EmbeddingSet {
    std::string article_id;
    std::size_t dim = 0;
    std::vector<std::vector<Vector>> vectors;
    std::string provider_tag;
    std::vector<SentenceRef> zero_vectors;  // all-zero rows carried over from the source

    const Vector& at(SentenceRef ref) const { return vectors.at(ref.section).at(ref.sentence); }
    const Vector& at(std::size_t section, std::size_t sentence) const { return vectors.at(section).at(sentence); }

    bool operator==(const EmbeddingSet&) const = default;
};

/// Throws unless the grid shape equals the document's and every row has length dim.
inline void check_alignment(const EmbeddingSet& es, const Document& doc) {
    if (es.article_id != doc.article_id)
        throw FormatError("embedding set for '" + es.article_id + "' used with document '" + doc.article_id + "'");
    if (es.vectors.size() != doc.section_count())
        throw FormatError(doc.article_id + ": embedding grid has " + std::to_string(es.vectors.size()) +
                          " sections, document has " + std::to_string(doc.section_count()));
    for (std::size_t s = 0; s < doc.section_count(); ++s) {
        if (es.vectors[s].size() != doc.sections[s].size())
            throw FormatError(doc.article_id + ": embedding grid section " + std::to_string(s) + " has " +
                              std::to_string(es.vectors[s].size()) + " rows, document has " +
                              std::to_string(doc.sections[s].size()));
        for (const auto& v : es.vectors[s])
            if (v.size() != es.dim)
                throw FormatError(doc.article_id + ": vector of length " + std::to_string(v.size()) +
                                  " in a set of dim " + std::to_string(es.dim));
    }
}

struct SectionEmbedding {
    std::size_t section_index = 0;
    Vector vector;
    bool degenerate = false;  // mean came out as the zero vector
};

inline Vector mean_of(const std::vector<Vector>& rows, std::size_t dim) {
    Vector out(dim, 0.0);
    if (rows.empty()) return out;
    for (const auto& r : rows)
        for (std::size_t k = 0; k < dim; ++k) out[k] += r[k];
    const double n = static_cast<double>(rows.size());
    for (auto& x : out) x /= n;
    return out;
}

inline SectionEmbedding section_embedding(const EmbeddingSet& es, std::size_t section_index) {
    if (section_index >= es.vectors.size())
        throw Error(es.article_id + ": no section " + std::to_string(section_index) + " in embedding set");
    SectionEmbedding out;
    out.section_index = section_index;
    out.vector = mean_of(es.vectors[section_index], es.dim);
    out.degenerate = is_zero(out.vector);
    return out;
}

inline SectionEmbedding section_embedding(const EmbeddingSet& es, const Section& section) {
    return section_embedding(es, section.section_index);
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

/// Lowercased whitespace tokens, the unit every provider embeds.
inline std::vector<std::string> embedding_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto t : split_whitespace(text)) out.push_back(to_lower(t));
    return out;
}

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string tag() const = 0;
    virtual EmbeddingSet embed(const Document& doc) const = 0;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Uniform in (0, 1].
inline double unit_open(std::uint64_t& state) {
    return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

/// Each distinct token maps to a fixed pseudo-random unit vector derived from a
/// seeded hash of its string; a sentence is the mean of its token vectors.
class RandomProvider : public EmbeddingProvider {
public:
    RandomProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
        if (dim == 0) throw Error("random provider: dim must be positive");
    }

    std::string tag() const override { return "random:" + std::to_string(dim_) + ":" + std::to_string(seed_); }

    Vector token_vector(std::string_view token) const {
        std::uint64_t state = detail::fnv1a(token) ^ (seed_ * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
        Vector v(dim_);
        for (std::size_t k = 0; k < dim_; k += 2) {
            // Box-Muller; both outputs used.
            const double r = std::sqrt(-2.0 * std::log(detail::unit_open(state)));
            const double theta = 2.0 * std::numbers::pi * detail::unit_open(state);
            v[k] = r * std::cos(theta);
            if (k + 1 < dim_) v[k + 1] = r * std::sin(theta);
        }
        const double n = norm(v);
        for (auto& x : v) x /= n;
        return v;
    }

    EmbeddingSet embed(const Document& doc) const override {
        EmbeddingSet es{doc.article_id, dim_, {}, tag(), {}};
        for (const auto& sec : doc.sections) {
            auto& rows = es.vectors.emplace_back();
            for (const auto& s : sec.sentences) {
                Vector v(dim_, 0.0);
                auto tokens = embedding_tokens(s.text);
                for (const auto& t : tokens) {
                    auto tv = token_vector(t);
                    for (std::size_t k = 0; k < dim_; ++k) v[k] += tv[k];
                }
                for (auto& x : v) x /= static_cast<double>(tokens.size());
                rows.push_back(std::move(v));
            }
        }
        return es;
    }

    std::size_t dim() const { return dim_; }

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Word vectors in word2vec text format: a "vocab_size dim" header, then one
/// "token f1 ... fdim" line per word. Lookups are lowercased.
class WordVectorProvider : public EmbeddingProvider {
public:
    struct Options {
        // When set, only these (lowercased) tokens are kept in memory.
        const std::unordered_set<std::string>* restrict_to = nullptr;
        WarningSink on_warning;
    };

    explicit WordVectorProvider(const std::string& path) : WordVectorProvider(path, Options{}) {}

    WordVectorProvider(const std::string& path, Options options) : path_(path), on_warning_(options.on_warning) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open word vector file: " + path);
        std::string header;
        if (!std::getline(in, header)) throw FormatError(path + ": empty word vector file");
        std::istringstream hs(header);
        std::size_t declared = 0;
        if (!(hs >> declared >> dim_) || dim_ == 0) throw FormatError(path + ": bad header '" + header + "'");

        std::vector<double> sum(dim_, 0.0);
        std::size_t seen = 0;
        std::string line;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ls(line);
            std::string token;
            if (!(ls >> token)) continue;
            Vector v(dim_);
            for (std::size_t k = 0; k < dim_; ++k)
                if (!(ls >> v[k]))
                    throw FormatError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim_) +
                                      " components for '" + token + "'");
            for (std::size_t k = 0; k < dim_; ++k) sum[k] += v[k];
            ++seen;
            auto key = to_lower(token);
            if (options.restrict_to && !options.restrict_to->contains(key)) continue;
            // Exact-case entries win over folded duplicates.
            if (key == token || !index_.contains(key)) index_[key] = std::move(v);
        }
        if (seen == 0) throw FormatError(path + ": no vectors");
        if (declared != seen)
            warn(on_warning_, path + ": header declares " + std::to_string(declared) + " words, read " +
                                  std::to_string(seen));
        for (auto& x : sum) x /= static_cast<double>(seen);
        fallback_ = std::move(sum);
    }

    std::string tag() const override { return "word_vectors:" + path_; }
    std::size_t dim() const { return dim_; }
    std::size_t vocabulary_size() const { return index_.size(); }
    const Vector& fallback() const { return fallback_; }

    const Vector* lookup(std::string_view token) const {
        auto it = index_.find(to_lower(token));
        return it == index_.end() ? nullptr : &it->second;
    }

    EmbeddingSet embed(const Document& doc) const override {
        EmbeddingSet es{doc.article_id, dim_, {}, tag(), {}};
        for (const auto& sec : doc.sections) {
            auto& rows = es.vectors.emplace_back();
            for (const auto& s : sec.sentences) {
                Vector v(dim_, 0.0);
                std::size_t hits = 0;
                for (const auto& t : embedding_tokens(s.text)) {
                    if (const auto* wv = lookup(t)) {
                        for (std::size_t k = 0; k < dim_; ++k) v[k] += (*wv)[k];
                        ++hits;
                    }
                }
                if (hits == 0) {
                    warn(on_warning_, doc.article_id + ": sentence (" + std::to_string(s.section_index) + "," +
                                          std::to_string(s.sentence_index) +
                                          ") has no in-vocabulary tokens; using corpus mean");
                    v = fallback_;
                } else {
                    for (auto& x : v) x /= static_cast<double>(hits);
                }
                rows.push_back(std::move(v));
            }
        }
        return es;
    }

private:
    std::string path_;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, Vector> index_;
    Vector fallback_;
    WarningSink on_warning_;
};

// ---------------------------------------------------------------------------
// Interchange format (JSONL):
//   {"article_id": str, "dim": int, "sections": [[[f, ...], ...], ...]}
// ---------------------------------------------------------------------------

inline nlohmann::json embedding_to_json(const EmbeddingSet& es) {
    return {{"article_id", es.article_id}, {"dim", es.dim}, {"sections", es.vectors}};
}

inline EmbeddingSet embedding_from_json(const nlohmann::json& j, std::string provider_tag = "precomputed") {
    EmbeddingSet es;
    try {
        es.article_id = j.at("article_id").get<std::string>();
        es.dim = j.at("dim").get<std::size_t>();
        es.vectors = j.at("sections").get<std::vector<std::vector<Vector>>>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("embedding record: ") + e.what());
    }
    es.provider_tag = std::move(provider_tag);
    if (es.dim == 0) throw FormatError(es.article_id + ": embedding dim must be positive");
    for (std::size_t s = 0; s < es.vectors.size(); ++s)
        for (std::size_t i = 0; i < es.vectors[s].size(); ++i) {
            const auto& v = es.vectors[s][i];
            if (v.size() != es.dim)
                throw FormatError(es.article_id + ": vector (" + std::to_string(s) + "," + std::to_string(i) +
                                  ") has length " + std::to_string(v.size()) + ", expected dim " +
                                  std::to_string(es.dim));
            if (is_zero(v)) es.zero_vectors.push_back({s, i});
        }
    return es;
}

/// Serves vectors from an interchange file. The file is indexed by article_id
/// on construction; vectors are parsed on demand.
class PrecomputedProvider : public EmbeddingProvider {
public:
    explicit PrecomputedProvider(const std::string& path, WarningSink on_warning = {})
        : path_(path), on_warning_(std::move(on_warning)) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open embedding file: " + path);
        std::string line;
        std::streamoff offset = 0;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto this_offset = offset;
            offset += static_cast<std::streamoff>(line.size()) + 1;
            if (trim(line).empty()) continue;
            auto id = extract_article_id(line);
            if (!id) throw FormatError(path + ":" + std::to_string(line_no) + ": no article_id");
            offsets_.emplace(std::move(*id), this_offset);
        }
    }

    std::string tag() const override { return "precomputed:" + path_; }
    bool contains(const std::string& article_id) const { return offsets_.contains(article_id); }
    std::size_t size() const { return offsets_.size(); }

    EmbeddingSet load(const std::string& article_id) const {
        auto it = offsets_.find(article_id);
        if (it == offsets_.end()) throw Error("no precomputed embeddings for article_id '" + article_id + "' in " + path_);
        std::ifstream in(path_, std::ios::binary);
        in.seekg(it->second);
        std::string line;
        std::getline(in, line);
        return embedding_from_json(nlohmann::json::parse(line), tag());
    }

    EmbeddingSet embed(const Document& doc) const override {
        auto es = load(doc.article_id);
        check_alignment(es, doc);
        for (auto ref : es.zero_vectors)
            warn(on_warning_, doc.article_id + ": all-zero precomputed vector at (" + std::to_string(ref.section) +
                                  "," + std::to_string(ref.sentence) + ")");
        return es;
    }

private:
    // Reads the article_id string without parsing the (large) vector payload.
    static std::optional<std::string> extract_article_id(const std::string& line) {
        static const std::string key = "\"article_id\"";
        auto p = line.find(key);
        if (p == std::string::npos) return std::nullopt;
        p += key.size();
        while (p < line.size() && is_space(line[p])) ++p;
        if (p >= line.size() || line[p] != ':') return std::nullopt;
        ++p;
        while (p < line.size() && is_space(line[p])) ++p;
        if (p >= line.size() || line[p] != '"') return std::nullopt;
        auto q = p + 1;
        while (q < line.size() && line[q] != '"') q += line[q] == '\\' ? 2 : 1;
        if (q >= line.size()) return std::nullopt;
        try {
            return nlohmann::json::parse(line.substr(p, q - p + 1)).get<std::string>();
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
    }

    std::string path_;
    std::unordered_map<std::string, std::streamoff> offsets_;
    WarningSink on_warning_;
};

/// Sparse tf-idf sentence vectors with document frequencies taken over the
/// ingested corpus. Each document is embedded in the space of its own terms
/// (sorted), which preserves every cosine in the full vocabulary space.
class TfidfProvider : public EmbeddingProvider {
public:
    explicit TfidfProvider(const std::vector<Document>& corpus) {
        for (const auto& d : corpus) add_document(d);
    }
    TfidfProvider() = default;

    /// Corpus-statistics pass; must complete before any embed() call.
    void add_document(const Document& d) {
        std::unordered_set<std::string> terms;
        for (const auto& sec : d.sections)
            for (const auto& s : sec.sentences)
                for (auto& t : embedding_tokens(s.text)) terms.insert(std::move(t));
        for (const auto& t : terms) ++df_[t];
        ++documents_;
    }

    double idf(const std::string& term) const {
        auto it = df_.find(term);
        const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
        const double n = static_cast<double>(documents_);
        return std::log((1.0 + n) / (1.0 + df)) + 1.0;
    }

    std::string tag() const override { return "tfidf"; }

    EmbeddingSet embed(const Document& doc) const override {
        std::map<std::string, std::size_t> vocab;
        std::vector<std::vector<std::vector<std::string>>> tokens;
        for (const auto& sec : doc.sections) {
            auto& rows = tokens.emplace_back();
            for (const auto& s : sec.sentences) {
                rows.push_back(embedding_tokens(s.text));
                for (const auto& t : rows.back()) vocab.emplace(t, 0);
            }
        }
        std::size_t next = 0;
        std::vector<double> weights;
        weights.reserve(vocab.size());
        for (auto& [term, idx] : vocab) {
            idx = next++;
            weights.push_back(idf(term));
        }
        EmbeddingSet es{doc.article_id, vocab.size(), {}, tag(), {}};
        for (const auto& sec_tokens : tokens) {
            auto& rows = es.vectors.emplace_back();
            for (const auto& sent : sec_tokens) {
                Vector v(vocab.size(), 0.0);
                for (const auto& t : sent) v[vocab.at(t)] += 1.0;
                for (std::size_t k = 0; k < v.size(); ++k) v[k] *= weights[k];
                rows.push_back(std::move(v));
            }
        }
        return es;
    }

    std::size_t corpus_documents() const { return documents_; }

private:
    std::unordered_map<std::string, std::size_t> df_;
    std::size_t documents_ = 0;
};

// ---------------------------------------------------------------------------
// Provider specs: "random:DIM[:SEED]", "word_vectors:PATH" (alias "w2v:PATH"),
// "precomputed:PATH", "tfidf".
// ---------------------------------------------------------------------------

struct ProviderSpec {
    enum class Kind { random, word_vectors, precomputed, tfidf };
    Kind kind = Kind::random;
    std::size_t dim = 200;
    std::optional<std::uint64_t> seed;
    std::string path;

    std::string to_string() const {
        switch (kind) {
            case Kind::random:
                return "random:" + std::to_string(dim) + (seed ? ":" + std::to_string(*seed) : "");
            case Kind::word_vectors: return "word_vectors:" + path;
            case Kind::precomputed: return "precomputed:" + path;
            case Kind::tfidf: return "tfidf";
        }
        return {};
    }
};

inline ProviderSpec parse_provider_spec(const std::string& text) {
    auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    ProviderSpec spec;
    auto parse_uint = [&](const std::string& s, const char* what) -> std::uint64_t {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (s.empty() || used != s.size() || s.front() == '-')
            throw Error("provider '" + text + "': bad " + what + " '" + s + "'");
        return v;
    };
    if (head == "random") {
        spec.kind = ProviderSpec::Kind::random;
        if (!rest.empty()) {
            auto c2 = rest.find(':');
            spec.dim = parse_uint(rest.substr(0, c2), "dim");
            if (c2 != std::string::npos) spec.seed = parse_uint(rest.substr(c2 + 1), "seed");
        }
        if (spec.dim == 0) throw Error("provider '" + text + "': dim must be positive");
    } else if (head == "word_vectors" || head == "w2v") {
        spec.kind = ProviderSpec::Kind::word_vectors;
        spec.path = rest;
    } else if (head == "precomputed") {
        spec.kind = ProviderSpec::Kind::precomputed;
        spec.path = rest;
    } else if (head == "tfidf") {
        spec.kind = ProviderSpec::Kind::tfidf;
    } else {
        throw Error("unknown embedding provider '" + text + "'");
    }
    if ((spec.kind == ProviderSpec::Kind::word_vectors || spec.kind == ProviderSpec::Kind::precomputed) &&
        spec.path.empty())
        throw Error("provider '" + text + "' needs a file path");
    return spec;
}

/// Vocabulary of a corpus, used to keep word-vector tables small.
inline std::unordered_set<std::string> corpus_vocabulary(const std::vector<Document>& corpus) {
    std::unordered_set<std::string> vocab;
    for (const auto& d : corpus)
        for (const auto& sec : d.sections)
            for (const auto& s : sec.sentences)
                for (auto& t : embedding_tokens(s.text)) vocab.insert(std::move(t));
    return vocab;
}

/// `corpus` feeds tf-idf statistics and trims word-vector vocabularies; it may
/// be null for the other providers.
inline std::unique_ptr<EmbeddingProvider> make_provider(const ProviderSpec& spec,
                                                        const std::vector<Document>* corpus = nullptr,
                                                        std::uint64_t default_seed = 0,
                                                        const WarningSink& on_warning = {}) {
    switch (spec.kind) {
        case ProviderSpec::Kind::random:
            return std::make_unique<RandomProvider>(spec.dim, spec.seed.value_or(default_seed));
        case ProviderSpec::Kind::word_vectors: {
            std::unordered_set<std::string> vocab;
            WordVectorProvider::Options opt;
            opt.on_warning = on_warning;
            if (corpus) {
                vocab = corpus_vocabulary(*corpus);
                opt.restrict_to = &vocab;
            }
            return std::make_unique<WordVectorProvider>(spec.path, opt);
        }
        case ProviderSpec::Kind::precomputed:
            return std::make_unique<PrecomputedProvider>(spec.path, on_warning);
        case ProviderSpec::Kind::tfidf:
            if (!corpus) throw Error("tfidf provider needs the corpus for document frequencies");
            return std::make_unique<TfidfProvider>(*corpus);
    }
    throw Error("unhandled provider kind");
}

inline EmbeddingSet embed_document(const Document& doc, const EmbeddingProvider& provider) {
    auto es = provider.embed(doc);
    check_alignment(es, doc);
    return es;
}

}  // namespace hiporank
