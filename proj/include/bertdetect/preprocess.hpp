#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "bertdetect/corpus.hpp"
#include "bertdetect/errors.hpp"
#include "bertdetect/porter.hpp"
#include "bertdetect/stopwords.hpp"
#include "bertdetect/unicode.hpp"

namespace bertdetect {

enum class Step {
    strip_special,
    lowercase,
    remove_digits,
    collapse_whitespace,
    split_words,
    remove_stopwords,
    stem,
};

inline const char* step_name(Step s) {
    switch (s) {
        case Step::strip_special: return "strip_special";
        case Step::lowercase: return "lowercase";
        case Step::remove_digits: return "remove_digits";
        case Step::collapse_whitespace: return "collapse_whitespace";
        case Step::split_words: return "split_words";
        case Step::remove_stopwords: return "remove_stopwords";
        case Step::stem: return "stem";
    }
    return "?";
}

inline Step parse_step(const std::string& name) {
    for (const Step s : {Step::strip_special, Step::lowercase, Step::remove_digits,
                         Step::collapse_whitespace, Step::split_words, Step::remove_stopwords,
                         Step::stem}) {
        if (name == step_name(s)) return s;
    }
    throw ConfigError("unknown pipeline step '" + name + "'");
}

struct PipelineConfig {
    std::vector<Step> steps = {Step::strip_special,    Step::lowercase,
                               Step::remove_digits,    Step::collapse_whitespace,
                               Step::split_words,      Step::remove_stopwords,
                               Step::stem};
    std::unordered_set<std::string> stopword_list = default_stopwords();

    bool has(Step s) const { return std::find(steps.begin(), steps.end(), s) != steps.end(); }

    void validate() const {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            for (std::size_t j = i + 1; j < steps.size(); ++j) {
                if (steps[i] == steps[j]) {
                    throw ConfigError(std::string("pipeline step '") + step_name(steps[i]) +
                                      "' appears twice");
                }
            }
        }
        if ((has(Step::remove_stopwords) || has(Step::stem)) && !has(Step::split_words)) {
            throw ConfigError("remove_stopwords/stem require split_words in the pipeline");
        }
    }
};

struct CleanDocument {
    std::size_t id = 0;
    std::vector<std::string> tokens;
};

// Character-level cleaning; the four stages apply in argument order.
inline std::string clean_text(const std::string& text, bool strip_special, bool lowercase,
                              bool remove_digits, bool collapse_whitespace) {
    std::vector<uint32_t> cps = uni::decode_utf8(text);
    for (uint32_t& c : cps) {
        if (strip_special && !(uni::is_letter(c) || uni::is_ascii_digit(c) || uni::is_space(c))) {
            c = ' ';
        }
        if (lowercase) c = uni::to_lower(c);
        if (remove_digits && uni::is_ascii_digit(c)) c = ' ';
    }
    if (!collapse_whitespace) return uni::encode_utf8(cps);

    std::string collapsed;
    collapsed.reserve(text.size());
    bool pending_space = false;
    for (const uint32_t c : cps) {
        if (uni::is_space(c)) {
            pending_space = !collapsed.empty();
        } else {
            if (pending_space) collapsed.push_back(' ');
            pending_space = false;
            uni::append_utf8(collapsed, c);
        }
    }
    return collapsed;
}

inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    for (const uint32_t c : uni::decode_utf8(text)) {
        if (uni::is_space(c)) {
            if (!current.empty()) {
                words.push_back(std::move(current));
                current.clear();
            }
        } else {
            uni::append_utf8(current, c);
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

inline std::vector<std::string> remove_stopwords(const std::vector<std::string>& words,
                                                 const std::unordered_set<std::string>& stopwords) {
    std::vector<std::string> kept;
    kept.reserve(words.size());
    for (const auto& w : words) {
        if (!stopwords.count(w)) kept.push_back(w);
    }
    return kept;
}

namespace detail {

inline std::string trim_ascii_space(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && uni::is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && uni::is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

// Configured steps run in the canonical order strip_special -> lowercase ->
// remove_digits -> collapse_whitespace -> split_words -> remove_stopwords ->
// stem, whatever their order in the config.  Without split_words the cleaned,
// trimmed text becomes a single token (empty text gives no tokens).
inline CleanDocument run_pipeline(const LabeledDocument& doc, const PipelineConfig& config) {
    config.validate();
    const std::string cleaned =
        clean_text(doc.text, config.has(Step::strip_special), config.has(Step::lowercase),
                   config.has(Step::remove_digits), config.has(Step::collapse_whitespace));

    CleanDocument out;
    out.id = doc.id;
    if (!config.has(Step::split_words)) {
        const std::string trimmed = detail::trim_ascii_space(cleaned);
        if (!trimmed.empty()) out.tokens.push_back(trimmed);
        return out;
    }
    out.tokens = split_words(cleaned);
    if (config.has(Step::remove_stopwords)) {
        out.tokens = remove_stopwords(out.tokens, config.stopword_list);
    }
    if (config.has(Step::stem)) {
        for (auto& t : out.tokens) t = porter_stem(std::move(t));
        // A bare "s" stems to the empty string; drop it to keep tokens non-empty.
        std::erase(out.tokens, std::string());
    }
    return out;
}

}  // namespace bertdetect
