#pragma once

// ROUGE-N and ROUGE-L over arbitrary token sequences. Tokens only need to be
// equality- and less-than comparable, so the same code scores strings and
// interned integer ids.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hiporank {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // an input was empty (or shorter than n)

    bool operator==(const PRF&) const = default;
};

inline double f_measure(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline PRF make_prf(std::size_t hits, std::size_t candidate_total, std::size_t reference_total) {
    if (candidate_total == 0 || reference_total == 0) return {0.0, 0.0, 0.0, true};
    const double p = static_cast<double>(hits) / static_cast<double>(candidate_total);
    const double r = static_cast<double>(hits) / static_cast<double>(reference_total);
    return {p, r, f_measure(p, r), false};
}

inline std::size_t ngram_total(std::size_t length, std::size_t n) { return length >= n ? length - n + 1 : 0; }

/// Clipped n-gram overlap: sum over distinct n-grams of min(count in a, count in b).
template <class T>
std::size_t ngram_overlap(std::span<const T> a, std::span<const T> b, std::size_t n) {
    if (n == 0 || a.size() < n || b.size() < n) return 0;
    auto grams = [n](std::span<const T> seq) {
        std::vector<std::span<const T>> g;
        g.reserve(seq.size() - n + 1);
        for (std::size_t i = 0; i + n <= seq.size(); ++i) g.push_back(seq.subspan(i, n));
        std::sort(g.begin(), g.end(), [](auto x, auto y) {
            return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
        });
        return g;
    };
    const auto ga = grams(a);
    const auto gb = grams(b);
    auto less = [](auto x, auto y) { return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end()); };

    std::size_t overlap = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ga.size() && j < gb.size()) {
        if (less(ga[i], gb[j])) {
            ++i;
        } else if (less(gb[j], ga[i])) {
            ++j;
        } else {
            std::size_t ca = 0;
            std::size_t cb = 0;
            const auto g = ga[i];
            while (i < ga.size() && !less(g, ga[i])) ++i, ++ca;
            while (j < gb.size() && !less(g, gb[j])) ++j, ++cb;
            overlap += std::min(ca, cb);
        }
    }
    return overlap;
}

template <class T>
PRF rouge_n(std::span<const T> candidate, std::span<const T> reference, std::size_t n) {
    return make_prf(ngram_overlap(candidate, reference, n), ngram_total(candidate.size(), n),
                    ngram_total(reference.size(), n));
}

/// Length of the longest common subsequence, O(|a||b|) time, O(|b|) memory.
template <class T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::uint32_t> prev(b.size() + 1, 0);
    std::vector<std::uint32_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

template <class T>
PRF rouge_l(std::span<const T> candidate, std::span<const T> reference) {
    return make_prf(lcs_length(candidate, reference), candidate.size(), reference.size());
}

// Convenience overloads for vectors.
template <class T>
PRF rouge_n(const std::vector<T>& candidate, const std::vector<T>& reference, std::size_t n) {
    return rouge_n(std::span<const T>(candidate), std::span<const T>(reference), n);
}

template <class T>
std::size_t lcs_length(const std::vector<T>& a, const std::vector<T>& b) {
    return lcs_length(std::span<const T>(a), std::span<const T>(b));
}

template <class T>
PRF rouge_l(const std::vector<T>& candidate, const std::vector<T>& reference) {
    return rouge_l(std::span<const T>(candidate), std::span<const T>(reference));
}

/// Maps token strings to dense ids so repeated scoring compares integers.
class TokenInterner {
public:
    std::uint32_t id(std::string_view token) {
        auto it = ids_.find(std::string(token));
        if (it != ids_.end()) return it->second;
        const auto next = static_cast<std::uint32_t>(ids_.size());
        ids_.emplace(std::string(token), next);
        return next;
    }

    std::vector<std::uint32_t> ids(const std::vector<std::string>& tokens) {
        std::vector<std::uint32_t> out;
        out.reserve(tokens.size());
        for (const auto& t : tokens) out.push_back(id(t));
        return out;
    }

    std::size_t size() const { return ids_.size(); }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
};

}  // namespace hiporank
