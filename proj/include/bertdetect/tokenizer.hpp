#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bertdetect/errors.hpp"
#include "bertdetect/io.hpp"
#include "bertdetect/preprocess.hpp"
#include "bertdetect/unicode.hpp"

namespace bertdetect {

inline constexpr std::array<std::string_view, 5> kSpecialTokens = {"[PAD]", "[UNK]", "[CLS]",
                                                                   "[SEP]", "[MASK]"};

struct Vocab {
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;
    static constexpr int kMask = 4;

    std::vector<std::string> id_to_token;
    std::unordered_map<std::string, int> token_to_id;

    int size() const { return static_cast<int>(id_to_token.size()); }

    // -1 when the token is unknown.
    int lookup(std::string_view token) const {
        const auto it = token_to_id.find(std::string(token));
        return it == token_to_id.end() ? -1 : it->second;
    }

    const std::string& token(int id) const {
        if (id < 0 || id >= size()) {
            throw ConfigError("token id " + std::to_string(id) + " out of range (V=" +
                              std::to_string(size()) + ")");
        }
        return id_to_token[static_cast<std::size_t>(id)];
    }

    bool is_special(int id) const { return id >= 0 && id <= kMask; }

    void add(const std::string& token) {
        if (token_to_id.emplace(token, size()).second) id_to_token.push_back(token);
    }
};

// Specials, then whole words by descending frequency (lexicographic
// tie-break, min_frequency filter), then a "##x" continuation for every
// character seen in the docs.  The word budget is sized so the continuations
// always fit within target_size.
inline Vocab build_vocab(const std::vector<CleanDocument>& docs, std::size_t target_size,
                         std::size_t min_frequency = 1) {
    if (docs.empty()) throw ConfigError("build_vocab needs a non-empty document list");
    if (target_size < 6) throw ConfigError("target_size must be at least 6");

    std::map<std::string, std::size_t> freq;
    std::set<uint32_t> seen_chars;
    for (const auto& doc : docs) {
        for (const auto& token : doc.tokens) {
            ++freq[token];
            for (const uint32_t cp : uni::decode_utf8(token)) seen_chars.insert(cp);
        }
    }

    if (target_size < kSpecialTokens.size() + seen_chars.size()) {
        throw ConfigError("target_size " + std::to_string(target_size) + " cannot hold " +
                          std::to_string(kSpecialTokens.size()) + " specials plus " +
                          std::to_string(seen_chars.size()) + " character continuations");
    }
    const std::size_t word_budget = target_size - kSpecialTokens.size() - seen_chars.size();

    std::vector<std::pair<std::string, std::size_t>> words(freq.begin(), freq.end());
    std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab vocab;
    for (const auto token : kSpecialTokens) vocab.add(std::string(token));
    std::size_t added = 0;
    for (const auto& [token, count] : words) {
        if (added == word_budget) break;
        if (count < min_frequency) break;  // sorted by frequency, so done
        const int before = vocab.size();
        vocab.add(token);
        if (vocab.size() > before) ++added;
    }
    for (const uint32_t cp : seen_chars) {
        std::string cont = "##";
        uni::append_utf8(cont, cp);
        vocab.add(cont);
    }
    return vocab;
}

// Greedy longest-match-first; continuation pieces carry the "##" marker.
// A word with no match at any point collapses to a single [UNK].
inline std::vector<std::string> wordpiece_split(const std::string& word, const Vocab& vocab) {
    // Codepoint boundaries, so multi-byte characters are never split.
    std::vector<std::size_t> bounds = {0};
    {
        std::size_t i = 0;
        while (i < word.size()) {
            const auto byte = static_cast<unsigned char>(word[i]);
            std::size_t len = byte < 0x80 ? 1 : byte < 0xE0 ? 2 : byte < 0xF0 ? 3 : 4;
            if (byte >= 0x80 && byte < 0xC0) len = 1;  // stray continuation byte
            i = std::min(word.size(), i + len);
            bounds.push_back(i);
        }
    }

    std::vector<std::string> pieces;
    std::size_t start = 0;  // index into bounds
    while (bounds[start] < word.size()) {
        std::size_t end = bounds.size() - 1;
        int id = -1;
        std::string piece;
        for (; end > start; --end) {
            piece = start > 0 ? "##" : "";
            piece.append(word, bounds[start], bounds[end] - bounds[start]);
            id = vocab.lookup(piece);
            if (id >= 0) break;
        }
        if (id < 0) return {std::string(kSpecialTokens[Vocab::kUnk])};
        pieces.push_back(std::move(piece));
        start = end;
    }
    return pieces;
}

struct Encoding {
    std::vector<int> input_ids;
    std::vector<int> segment_ids;
    std::vector<int> attention_mask;
};

namespace detail {

inline std::vector<int> to_piece_ids(const std::vector<std::string>& words, const Vocab& vocab) {
    std::vector<int> ids;
    for (const auto& word : words) {
        for (const auto& piece : wordpiece_split(word, vocab)) {
            ids.push_back(vocab.lookup(piece));
        }
    }
    return ids;
}

}  // namespace detail

// [CLS] A [SEP] (+ B [SEP]), truncating the currently longest segment first
// (ties pop from B), right-padded to max_len.
inline Encoding encode(const std::vector<std::string>& text_a,
                       const std::vector<std::string>* text_b, const Vocab& vocab,
                       std::size_t max_len) {
    const std::size_t n_special = text_b != nullptr ? 3 : 2;
    if (max_len < n_special) {
        throw ConfigError("max_len " + std::to_string(max_len) + " cannot hold " +
                          std::to_string(n_special) + " special tokens");
    }
    std::vector<int> a = detail::to_piece_ids(text_a, vocab);
    std::vector<int> b = text_b != nullptr ? detail::to_piece_ids(*text_b, vocab)
                                           : std::vector<int>{};
    const std::size_t budget = max_len - n_special;
    while (a.size() + b.size() > budget) {
        if (text_b != nullptr && b.size() >= a.size() && !b.empty()) {
            b.pop_back();
        } else {
            a.pop_back();
        }
    }

    Encoding enc;
    enc.input_ids.reserve(max_len);
    enc.input_ids.push_back(Vocab::kCls);
    enc.input_ids.insert(enc.input_ids.end(), a.begin(), a.end());
    enc.input_ids.push_back(Vocab::kSep);
    const std::size_t first_sep = enc.input_ids.size() - 1;
    if (text_b != nullptr) {
        enc.input_ids.insert(enc.input_ids.end(), b.begin(), b.end());
        enc.input_ids.push_back(Vocab::kSep);
    }
    enc.input_ids.resize(max_len, Vocab::kPad);

    enc.segment_ids.assign(max_len, 0);
    if (text_b != nullptr) {
        for (std::size_t i = first_sep + 1; i < max_len; ++i) enc.segment_ids[i] = 1;
    }
    enc.attention_mask.assign(max_len, 0);
    for (std::size_t i = 0; i < max_len; ++i) {
        if (enc.input_ids[i] != Vocab::kPad) enc.attention_mask[i] = 1;
    }
    return enc;
}

// Drops specials, merges "##" pieces, joins words with single spaces.
inline std::string decode(const std::vector<int>& ids, const Vocab& vocab) {
    std::string out;
    bool in_word = false;
    for (const int id : ids) {
        const std::string& token = vocab.token(id);  // range-checks
        if (vocab.is_special(id)) continue;
        const bool continuation = token.size() >= 2 && token[0] == '#' && token[1] == '#';
        if (continuation) {
            out.append(token, 2, std::string::npos);
        } else {
            if (in_word) out.push_back(' ');
            out += token;
        }
        in_word = true;
    }
    return out;
}

inline void save_vocab(const Vocab& vocab, const std::string& path) {
    std::string out;
    for (const auto& token : vocab.id_to_token) {
        out += token;
        out.push_back('\n');
    }
    io::write_file_atomic(path, out);
}

// One token per line, id = zero-based line index; the five specials must
// occupy ids 0-4.
inline Vocab load_vocab(const std::string& path) {
    const std::string content = io::read_file(path);
    Vocab vocab;
    std::size_t pos = content.rfind("\xEF\xBB\xBF", 0) == 0 ? 3 : 0;
    std::size_t lineno = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string token = content.substr(pos, eol - pos);
        pos = eol + 1;
        if (!token.empty() && token.back() == '\r') token.pop_back();
        if (token.empty()) {
            throw ConfigError(path + ": empty token at line " + std::to_string(lineno + 1));
        }
        for (const char c : token) {
            if (uni::is_space(static_cast<unsigned char>(c))) {
                throw ConfigError(path + ": token at line " + std::to_string(lineno + 1) +
                                  " contains whitespace");
            }
        }
        const int before = vocab.size();
        vocab.add(token);
        if (vocab.size() == before) {
            throw ConfigError(path + ": duplicate token '" + token + "' at line " +
                              std::to_string(lineno + 1));
        }
        ++lineno;
    }
    if (vocab.size() < static_cast<int>(kSpecialTokens.size())) {
        throw ConfigError(path + ": vocab must contain at least the five special tokens");
    }
    for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
        if (vocab.id_to_token[i] != kSpecialTokens[i]) {
            throw ConfigError(path + ": token at id " + std::to_string(i) + " must be " +
                              std::string(kSpecialTokens[i]));
        }
    }
    return vocab;
}

}  // namespace bertdetect
