#pragma once

#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing_support {

using hiporank::Document;
using hiporank::EmbeddingSet;

/// Document whose section k has sizes[k] sentences. Sentence texts are
/// "s<sec>_<idx>" followed by `extra_tokens` filler words.
inline Document shaped_document(const std::vector<std::size_t>& sizes, std::size_t extra_tokens = 0,
                                const std::string& id = "doc") {
    std::vector<std::vector<std::string>> sections;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        std::vector<std::string> sents;
        for (std::size_t i = 0; i < sizes[s]; ++i) {
            std::string text = "s" + std::to_string(s) + "_" + std::to_string(i);
            for (std::size_t k = 0; k < extra_tokens; ++k) text += " w" + std::to_string(k);
            sents.push_back(text);
        }
        sections.push_back(std::move(sents));
    }
    return hiporank::make_document(id, sections, {}, {"a reference sentence ."});
}

inline std::vector<std::size_t> random_shape(std::mt19937_64& rng, std::size_t max_sections, std::size_t max_sentences) {
    std::uniform_int_distribution<std::size_t> sec(1, max_sections);
    std::uniform_int_distribution<std::size_t> sent(1, max_sentences);
    std::vector<std::size_t> sizes(sec(rng));
    for (auto& n : sizes) n = sent(rng);
    return sizes;
}

/// Gaussian embeddings on the document grid.
inline EmbeddingSet random_embeddings(const Document& doc, std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    EmbeddingSet es;
    es.article_id = doc.article_id;
    es.dim = dim;
    es.provider_tag = "test";
    for (const auto& sec : doc.sections) {
        std::vector<hiporank::Vector> rows;
        for (std::size_t i = 0; i < sec.size(); ++i) {
            hiporank::Vector v(dim);
            for (auto& x : v) x = g(rng);
            rows.push_back(std::move(v));
        }
        es.vectors.push_back(std::move(rows));
    }
    return es;
}

/// Non-negative embeddings, so every cosine is >= 0.
inline EmbeddingSet positive_embeddings(const Document& doc, std::size_t dim, std::mt19937_64& rng) {
    auto es = random_embeddings(doc, dim, rng);
    for (auto& sec : es.vectors)
        for (auto& v : sec)
            for (auto& x : v) x = std::abs(x) + 0.01;
    return es;
}

inline EmbeddingSet scaled(EmbeddingSet es, double c) {
    for (auto& sec : es.vectors)
        for (auto& v : sec)
            for (auto& x : v) x *= c;
    return es;
}

/// Longest common subsequence by trying every subsequence of `a`.
inline std::size_t lcs_by_enumeration(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
        const auto len = static_cast<std::size_t>(std::popcount(mask));
        if (len <= best) continue;
        std::size_t j = 0;
        bool ok = true;
        for (std::size_t i = 0; i < a.size() && ok; ++i) {
            if (!(mask >> i & 1u)) continue;
            while (j < b.size() && b[j] != a[i]) ++j;
            if (j == b.size())
                ok = false;
            else
                ++j;
        }
        if (ok) best = len;
    }
    return best;
}

/// Fresh path under the temp directory, removed on destruction.
class TempFile {
public:
    explicit TempFile(const std::string& name) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("hiporank_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + name);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }

    std::string str() const { return path_.string(); }

    void write(const std::string& content) const { std::ofstream(path_, std::ios::binary) << content; }

    std::string read() const {
        std::ifstream in(path_, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support
