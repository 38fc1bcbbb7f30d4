#pragma once

// Porter stemmer, after the 1980 algorithm as published: no minimum-length
// guard, step 2 rewrites ABLI -> ABLE, and there is no LOGI rule.  In every
// step the longest matching suffix wins and its condition then gates the
// rewrite; a failed condition does not fall back to shorter suffixes.

#include <cstddef>
#include <string>
#include <string_view>

namespace bertdetect {

namespace porter_detail {

inline bool is_cons(std::string_view w, std::size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 || !is_cons(w, i - 1);
        default:
            return true;
    }
}

// m in [C](VC)^m[V], counted as vowel->consonant boundaries.
inline int measure(std::string_view stem) {
    int m = 0;
    for (std::size_t i = 1; i < stem.size(); ++i) {
        if (!is_cons(stem, i - 1) && is_cons(stem, i)) ++m;
    }
    return m;
}

inline bool has_vowel(std::string_view stem) {
    for (std::size_t i = 0; i < stem.size(); ++i) {
        if (!is_cons(stem, i)) return true;
    }
    return false;
}

inline bool ends_double_cons(std::string_view w) {
    const std::size_t n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1);
}

// cvc at the end, where the final consonant is not w, x, or y.
inline bool ends_cvc(std::string_view w) {
    const std::size_t n = w.size();
    if (n < 3 || !is_cons(w, n - 3) || is_cons(w, n - 2) || !is_cons(w, n - 1)) return false;
    const char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

inline bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Longest matching suffix wins; rewrite applies iff m(stem) > min_m.
inline void apply_m_gated(std::string& w, const Rule* rules, std::size_t count, int min_m) {
    const Rule* best = nullptr;
    for (std::size_t r = 0; r < count; ++r) {
        if (ends_with(w, rules[r].suffix) &&
            (best == nullptr || rules[r].suffix.size() > best->suffix.size())) {
            best = &rules[r];
        }
    }
    if (best == nullptr) return;
    const std::size_t stem_len = w.size() - best->suffix.size();
    if (measure(std::string_view(w).substr(0, stem_len)) > min_m) {
        w.replace(stem_len, best->suffix.size(), best->replacement);
    }
}

inline void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.erase(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.erase(w.size() - 2);
    } else if (ends_with(w, "ss")) {
        // kept
    } else if (ends_with(w, "s")) {
        w.pop_back();
    }
}

inline void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
        if (measure(std::string_view(w).substr(0, w.size() - 3)) > 0) w.pop_back();
        return;
    }
    std::size_t cut = 0;
    if (ends_with(w, "ed")) {
        cut = 2;
    } else if (ends_with(w, "ing")) {
        cut = 3;
    } else {
        return;
    }
    if (!has_vowel(std::string_view(w).substr(0, w.size() - cut))) return;
    w.erase(w.size() - cut);
    // Cleanup after a successful ED/ING removal.
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
    } else if (ends_double_cons(w)) {
        const char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (measure(w) == 1 && ends_cvc(w)) {
        w.push_back('e');
    }
}

inline void step1c(std::string& w) {
    if (ends_with(w, "y") && has_vowel(std::string_view(w).substr(0, w.size() - 1))) {
        w.back() = 'i';
    }
}

inline constexpr Rule kStep2[] = {
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
    {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
    {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
    {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
    {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
};

inline constexpr Rule kStep3[] = {
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
};

inline constexpr Rule kStep4[] = {
    {"al", ""},    {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},
    {"able", ""},  {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
    {"ent", ""},   {"ion", ""},  {"ou", ""},   {"ism", ""}, {"ate", ""},
    {"iti", ""},   {"ous", ""},  {"ive", ""},  {"ize", ""},
};

inline void step4(std::string& w) {
    const Rule* best = nullptr;
    for (const Rule& rule : kStep4) {
        if (ends_with(w, rule.suffix) &&
            (best == nullptr || rule.suffix.size() > best->suffix.size())) {
            best = &rule;
        }
    }
    if (best == nullptr) return;
    const std::string_view stem = std::string_view(w).substr(0, w.size() - best->suffix.size());
    if (measure(stem) <= 1) return;
    if (best->suffix == "ion" && !(ends_with(stem, "s") || ends_with(stem, "t"))) return;
    w.erase(stem.size());
}

inline void step5a(std::string& w) {
    if (!ends_with(w, "e")) return;
    const std::string_view stem = std::string_view(w).substr(0, w.size() - 1);
    const int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) w.pop_back();
}

inline void step5b(std::string& w) {
    if (ends_with(w, "l") && ends_double_cons(w) &&
        measure(std::string_view(w).substr(0, w.size() - 1)) > 1) {
        w.pop_back();
    }
}

}  // namespace porter_detail

// Stems a lowercase ASCII-letter word; anything else passes through unchanged.
inline std::string porter_stem(std::string word) {
    for (const char c : word) {
        if (c < 'a' || c > 'z') return word;
    }
    if (word.empty()) return word;
    using namespace porter_detail;
    step1a(word);
    step1b(word);
    step1c(word);
    apply_m_gated(word, kStep2, std::size(kStep2), 0);
    apply_m_gated(word, kStep3, std::size(kStep3), 0);
    step4(word);
    step5a(word);
    step5b(word);
    return word;
}

}  // namespace bertdetect
