#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hiporank {

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for malformed input records (bad JSON, missing fields, shape errors).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Receives human-readable warnings (dropped sentences, OOV fallbacks, ...).
/// An empty sink discards them.
using WarningSink = std::function<void(const std::string&)>;

inline void warn(const WarningSink& sink, const std::string& message) {
    if (sink) sink(message);
}

inline bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

/// Splits on runs of ASCII whitespace; no empty pieces are produced.
inline std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

inline std::size_t count_whitespace_tokens(std::string_view s) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : s) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Position of a sentence in the two-level document grid.
struct SentenceRef {
    std::size_t section = 0;
    std::size_t sentence = 0;

    friend auto operator<=>(const SentenceRef&, const SentenceRef&) = default;
};

}  // namespace hiporank
