#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "bertdetect/csv.hpp"
#include "bertdetect/errors.hpp"
#include "bertdetect/io.hpp"
#include "bertdetect/rng.hpp"

namespace bertdetect {

// One text with its binary origin label.
struct LabeledDocument {
    std::size_t id = 0;
    std::string text;
    int label = 0;
};

struct Corpus {
    std::vector<LabeledDocument> docs;

    std::size_t size() const { return docs.size(); }
    bool empty() const { return docs.empty(); }
};

struct SplitSpec {
    double train_fraction = 0.6;
    uint64_t seed = 0;
    bool stratified = false;
};

struct ClassSummary {
    std::size_t count = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double lower_fence = 0, upper_fence = 0;
    std::size_t outlier_count = 0;
};

struct CorpusStats {
    std::size_t count_label0 = 0;
    std::size_t count_label1 = 0;
    double proportion_label0 = 0;
    double proportion_label1 = 0;
    ClassSummary label0;
    ClassSummary label1;
};

namespace detail {

inline bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline std::string lower_ascii(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

// Median of a non-empty sorted range.
inline double median_sorted(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    const std::size_t mid = lo + n / 2;
    if (n % 2 == 1) return v[mid];
    return 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace detail

// Column names matched case-insensitively; defaults follow the corpus schema.
inline Corpus load_corpus(const std::string& path, const std::string& text_col = "text",
                          const std::string& label_col = "generated") {
    csv::Reader reader = csv::Reader::from_file(path);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw ConfigError(path + ": empty file, expected a header row");

    std::ptrdiff_t text_idx = -1, label_idx = -1;
    const std::string want_text = detail::lower_ascii(text_col);
    const std::string want_label = detail::lower_ascii(label_col);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string name = detail::lower_ascii(fields[i]);
        if (name == want_text) text_idx = static_cast<std::ptrdiff_t>(i);
        if (name == want_label) label_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (text_idx < 0) throw ConfigError(path + ": header has no '" + text_col + "' column");
    if (label_idx < 0) throw ConfigError(path + ": header has no '" + label_col + "' column");
    const std::size_t ncols = fields.size();

    Corpus corpus;
    while (reader.next(fields)) {
        const std::string row = std::to_string(reader.record_number());
        if (fields.size() != ncols) {
            throw ConfigError(path + ": row " + row + " has " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(ncols));
        }
        const std::string& text = fields[static_cast<std::size_t>(text_idx)];
        const std::string& label_str = fields[static_cast<std::size_t>(label_idx)];
        if (detail::is_blank(text)) {
            throw ConfigError(path + ": row " + row + " has an empty text cell");
        }
        int label = -1;
        if (label_str == "0") {
            label = 0;
        } else if (label_str == "1") {
            label = 1;
        } else {
            throw ConfigError(path + ": row " + row + " label '" + label_str +
                              "' is not 0 or 1");
        }
        corpus.docs.push_back({corpus.docs.size(), text, label});
    }
    return corpus;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    std::string out = "text,generated\n";
    for (const auto& doc : corpus.docs) {
        out += csv::join_record({doc.text, std::to_string(doc.label)});
    }
    io::write_file_atomic(path, out);
}

// Seeded shuffle, then |train| = floor(train_fraction * N). Original document
// ids are preserved in both halves.
inline std::pair<Corpus, Corpus> split(const Corpus& corpus, const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
        throw ConfigError("train_fraction must be in (0, 1)");
    }
    if (corpus.size() < 2) throw ConfigError("corpus too small to split");

    auto take = [&](const std::vector<std::size_t>& order, std::size_t n_train, Corpus& train,
                    Corpus& test) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            (i < n_train ? train : test).docs.push_back(corpus.docs[order[i]]);
        }
    };

    Corpus train, test;
    Rng rng(spec.seed);
    if (!spec.stratified) {
        std::vector<std::size_t> order(corpus.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        const auto n_train =
            static_cast<std::size_t>(spec.train_fraction * static_cast<double>(corpus.size()));
        if (n_train == 0 || n_train == corpus.size()) {
            throw ConfigError("split leaves one side empty");
        }
        take(order, n_train, train, test);
    } else {
        for (const int label : {0, 1}) {
            std::vector<std::size_t> order;
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                if (corpus.docs[i].label == label) order.push_back(i);
            }
            rng.shuffle(order);
            const auto n_train =
                static_cast<std::size_t>(spec.train_fraction * static_cast<double>(order.size()));
            take(order, n_train, train, test);
        }
        if (train.empty() || test.empty()) throw ConfigError("split leaves one side empty");
    }
    return {std::move(train), std::move(test)};
}

inline std::size_t whitespace_word_count(const std::string& text) {
    std::size_t count = 0;
    bool in_word = false;
    for (const unsigned char c : text) {
        if (std::isspace(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

// Tukey quartiles by median-of-halves; the median is excluded from both
// halves when the count is odd.
inline ClassSummary summarize_values(std::vector<double> values) {
    ClassSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    s.min = values.front();
    s.max = values.back();
    s.median = detail::median_sorted(values, 0, n);
    if (n == 1) {
        s.q1 = s.q3 = s.median;
    } else {
        const std::size_t half = n / 2;
        s.q1 = detail::median_sorted(values, 0, half);
        s.q3 = detail::median_sorted(values, n - half, n);
    }
    const double iqr = s.q3 - s.q1;
    s.lower_fence = s.q1 - 1.5 * iqr;
    s.upper_fence = s.q3 + 1.5 * iqr;
    for (const double v : values) {
        if (v < s.lower_fence || v > s.upper_fence) ++s.outlier_count;
    }
    return s;
}

inline double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

inline CorpusStats compute_stats(const Corpus& corpus) {
    if (corpus.empty()) throw ConfigError("cannot compute stats of an empty corpus");
    CorpusStats stats;
    std::vector<double> wc0, wc1;
    for (const auto& doc : corpus.docs) {
        const auto wc = static_cast<double>(whitespace_word_count(doc.text));
        if (doc.label == 0) {
            ++stats.count_label0;
            wc0.push_back(wc);
        } else {
            ++stats.count_label1;
            wc1.push_back(wc);
        }
    }
    const auto total = static_cast<double>(corpus.size());
    stats.proportion_label0 = round4(static_cast<double>(stats.count_label0) / total);
    stats.proportion_label1 = round4(static_cast<double>(stats.count_label1) / total);
    stats.label0 = summarize_values(std::move(wc0));
    stats.label1 = summarize_values(std::move(wc1));
    return stats;
}

}  // namespace bertdetect
