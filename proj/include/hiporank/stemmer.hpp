#pragma once

// Porter (1980) suffix-stripping stemmer, following the reference C
// implementation (including its "bli" -> "ble" and "logi" -> "log" rules).
// Input is expected to be lowercase ASCII.

#include <string>
#include <string_view>

namespace hiporank {

class PorterStemmer {
public:
    std::string operator()(std::string_view word) const {
        State s{std::string(word), 0, 0};
        s.k = static_cast<int>(s.b.size()) - 1;
        if (s.k <= 1) return s.b;
        step1ab(s);
        if (s.k > 0) {
            step1c(s);
            step2(s);
            step3(s);
            step4(s);
            step5(s);
        }
        s.b.resize(static_cast<std::size_t>(s.k + 1));
        return s.b;
    }

private:
    struct State {
        std::string b;
        int k;  // last index of the current stem
        int j;  // scratch end index set by ends()
    };

    static bool cons(const State& s, int i) {
        switch (s.b[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(s, i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in b[0..j].
    static int m(const State& s) {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > s.j) return n;
            if (!cons(s, i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > s.j) return n;
                if (cons(s, i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > s.j) return n;
                if (!cons(s, i)) break;
                ++i;
            }
            ++i;
        }
    }

    static bool vowel_in_stem(const State& s) {
        for (int i = 0; i <= s.j; ++i)
            if (!cons(s, i)) return true;
        return false;
    }

    static bool double_c(const State& s, int j) {
        if (j < 1) return false;
        if (s.b[j] != s.b[j - 1]) return false;
        return cons(s, j);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y.
    static bool cvc(const State& s, int i) {
        if (i < 2 || !cons(s, i) || cons(s, i - 1) || !cons(s, i - 2)) return false;
        const char ch = s.b[i];
        return !(ch == 'w' || ch == 'x' || ch == 'y');
    }

    static bool ends(State& s, std::string_view suffix) {
        const int len = static_cast<int>(suffix.size());
        if (suffix.back() != s.b[s.k]) return false;
        if (len > s.k + 1) return false;
        if (std::string_view(s.b).substr(static_cast<std::size_t>(s.k - len + 1), suffix.size()) != suffix) return false;
        s.j = s.k - len;
        return true;
    }

    static void set_to(State& s, std::string_view repl) {
        s.b.replace(static_cast<std::size_t>(s.j + 1), std::string::npos, repl);
        s.k = s.j + static_cast<int>(repl.size());
    }

    static void r(State& s, std::string_view repl) {
        if (m(s) > 0) set_to(s, repl);
    }

    static void step1ab(State& s) {
        if (s.b[s.k] == 's') {
            if (ends(s, "sses"))
                s.k -= 2;
            else if (ends(s, "ies"))
                set_to(s, "i");
            else if (s.b[s.k - 1] != 's')
                --s.k;
        }
        if (ends(s, "eed")) {
            if (m(s) > 0) --s.k;
        } else if ((ends(s, "ed") || ends(s, "ing")) && vowel_in_stem(s)) {
            s.k = s.j;
            if (ends(s, "at"))
                set_to(s, "ate");
            else if (ends(s, "bl"))
                set_to(s, "ble");
            else if (ends(s, "iz"))
                set_to(s, "ize");
            else if (double_c(s, s.k)) {
                --s.k;
                const char ch = s.b[s.k];
                if (ch == 'l' || ch == 's' || ch == 'z') ++s.k;
            } else {
                s.j = s.k;
                if (m(s) == 1 && cvc(s, s.k)) set_to(s, "e");
            }
        }
        s.b.resize(static_cast<std::size_t>(s.k + 1));
    }

    static void step1c(State& s) {
        if (ends(s, "y") && vowel_in_stem(s)) s.b[s.k] = 'i';
    }

    static void step2(State& s) {
        struct Rule { std::string_view from, to; };
        static constexpr Rule rules[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},  {"izer", "ize"},
            {"bli", "ble"},     {"alli", "al"},     {"entli", "ent"},  {"eli", "e"},      {"ousli", "ous"},
            {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},   {"alism", "al"},   {"iveness", "ive"},
            {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},  {"biliti", "ble"},
            {"logi", "log"},
        };
        if (s.k < 1) return;
        const char pen = s.b[s.k - 1];
        for (const auto& rule : rules) {
            if (rule.from[rule.from.size() - 2] != pen) continue;
            if (ends(s, rule.from)) {
                r(s, rule.to);
                return;
            }
        }
    }

    static void step3(State& s) {
        struct Rule { std::string_view from, to; };
        static constexpr Rule rules[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        };
        for (const auto& rule : rules) {
            if (ends(s, rule.from)) {
                r(s, rule.to);
                return;
            }
        }
    }

    static void step4(State& s) {
        static constexpr std::string_view suffixes[] = {
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        if (s.k < 1) return;
        const char pen = s.b[s.k - 1];
        bool hit = false;
        for (auto suffix : suffixes) {
            if (suffix[suffix.size() - 2] != pen) continue;
            if (!ends(s, suffix)) continue;
            if (suffix == "ion" && !(s.j >= 0 && (s.b[s.j] == 's' || s.b[s.j] == 't'))) continue;
            hit = true;
            break;
        }
        if (hit && m(s) > 1) s.k = s.j;
    }

    static void step5(State& s) {
        s.j = s.k;
        if (s.b[s.k] == 'e') {
            const int a = m(s);
            if (a > 1 || (a == 1 && !cvc(s, s.k - 1))) --s.k;
        }
        // j is not reset here: m() measures up to the stem end before this step.
        if (s.b[s.k] == 'l' && double_c(s, s.k) && m(s) > 1) --s.k;
    }
};

inline std::string porter_stem(std::string_view word) { return PorterStemmer{}(word); }

}  // namespace hiporank
