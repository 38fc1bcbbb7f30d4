#pragma once

// BERT-style encoder with MLM, NSP, and binary-classification heads, plus
// the "BTWA" weight archive.  The MLM output projection shares storage with
// the token embedding table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bertdetect/errors.hpp"
#include "bertdetect/io.hpp"
#include "bertdetect/rng.hpp"
#include "bertdetect/tensor.hpp"
#include "bertdetect/tokenizer.hpp"

namespace bertdetect {

struct BertConfig {
    std::size_t num_layers = 4;
    std::size_t hidden_size = 128;
    std::size_t num_heads = 4;
    std::size_t ff_size = 512;
    std::size_t vocab_size = 0;
    std::size_t max_positions = 128;
    std::size_t segment_types = 2;
    float dropout_rate = 0.1f;

    std::size_t head_dim() const { return hidden_size / num_heads; }

    void validate() const {
        if (num_layers == 0 || hidden_size == 0 || num_heads == 0 || ff_size == 0 ||
            vocab_size == 0 || max_positions == 0 || segment_types == 0) {
            throw ConfigError("model config: all sizes must be positive");
        }
        if (hidden_size % num_heads != 0) {
            throw ConfigError("model config: hidden_size must be divisible by num_heads");
        }
        if (!(dropout_rate >= 0.0f && dropout_rate < 1.0f)) {
            throw ConfigError("model config: dropout_rate must be in [0, 1)");
        }
    }
};

struct ModelWeights {
    BertConfig config;
    std::vector<std::pair<std::string, TensorPtr>> params;  // canonical order
    std::unordered_map<std::string, std::size_t> index;

    void add(const std::string& name, TensorPtr t) {
        if (!index.emplace(name, params.size()).second) {
            throw ConfigError("duplicate parameter name '" + name + "'");
        }
        params.emplace_back(name, std::move(t));
    }

    const TensorPtr& get(const std::string& name) const {
        const auto it = index.find(name);
        if (it == index.end()) throw ConfigError("unknown parameter '" + name + "'");
        return params[it->second].second;
    }

    bool has(const std::string& name) const { return index.count(name) != 0; }
};

namespace model_detail {

// Canonical parameter list: name, shape, and init kind.
enum class Init { normal, zero, one };

struct ParamSpec {
    std::string name;
    std::vector<std::size_t> shape;
    Init init;
};

inline std::vector<ParamSpec> param_specs(const BertConfig& c) {
    std::vector<ParamSpec> specs;
    const std::size_t h = c.hidden_size, f = c.ff_size;
    auto norm = [&](std::string name, std::vector<std::size_t> shape) {
        specs.push_back({std::move(name), std::move(shape), Init::normal});
    };
    auto zero = [&](std::string name, std::vector<std::size_t> shape) {
        specs.push_back({std::move(name), std::move(shape), Init::zero});
    };
    auto ln = [&](const std::string& prefix) {
        specs.push_back({prefix + ".gamma", {h}, Init::one});
        specs.push_back({prefix + ".beta", {h}, Init::zero});
    };

    norm("embeddings.token", {c.vocab_size, h});
    norm("embeddings.position", {c.max_positions, h});
    norm("embeddings.segment", {c.segment_types, h});
    ln("embeddings.ln");
    for (std::size_t l = 0; l < c.num_layers; ++l) {
        const std::string p = "layer" + std::to_string(l);
        for (const char* m : {"wq", "wk", "wv", "wo"}) norm(p + ".attn." + m, {h, h});
        for (const char* b : {"bq", "bk", "bv", "bo"}) zero(p + ".attn." + b, {h});
        ln(p + ".attn.ln");
        norm(p + ".ffn.w1", {h, f});
        zero(p + ".ffn.b1", {f});
        norm(p + ".ffn.w2", {f, h});
        zero(p + ".ffn.b2", {h});
        ln(p + ".ffn.ln");
    }
    norm("pooler.w", {h, h});
    zero("pooler.b", {h});
    norm("mlm.transform.w", {h, h});
    zero("mlm.transform.b", {h});
    ln("mlm.transform.ln");
    zero("mlm.output_bias", {c.vocab_size});
    norm("nsp.w", {h, 2});
    zero("nsp.b", {2});
    norm("classifier.w", {h, 2});
    zero("classifier.b", {2});
    return specs;
}

}  // namespace model_detail

// Truncated normal(0, 0.02) clipped at 2 sigma for weights, zeros for
// biases/beta, ones for gamma; deterministic per seed.
inline ModelWeights init_model(const BertConfig& config, uint64_t seed) {
    config.validate();
    ModelWeights w;
    w.config = config;
    Rng rng(seed);
    for (const auto& spec : model_detail::param_specs(config)) {
        TensorPtr t = make_tensor(spec.shape, /*requires_grad=*/true);
        switch (spec.init) {
            case model_detail::Init::normal:
                for (auto& v : t->data) v = rng.truncated_normal(0.02f, 0.04f);
                break;
            case model_detail::Init::zero:
                break;
            case model_detail::Init::one:
                std::fill(t->data.begin(), t->data.end(), 1.0f);
                break;
        }
        w.add(spec.name, std::move(t));
    }
    return w;
}

// ---- forward passes ----

inline TensorPtr forward_encoder(Graph& g, const ModelWeights& w, const Encoding& enc,
                                 bool train_mode, Rng& rng) {
    const BertConfig& c = w.config;
    const std::size_t t_len = enc.input_ids.size();
    ops_detail::check(t_len > 0, "forward_encoder: empty encoding");
    ops_detail::check(t_len <= c.max_positions, "forward_encoder: sequence exceeds max_positions");
    ops_detail::check(enc.segment_ids.size() == t_len && enc.attention_mask.size() == t_len,
                      "forward_encoder: encoding field lengths disagree");

    auto maybe_dropout = [&](const TensorPtr& x) {
        return train_mode ? dropout(g, x, c.dropout_rate, rng) : x;
    };

    std::vector<int> positions(t_len);
    for (std::size_t i = 0; i < t_len; ++i) positions[i] = static_cast<int>(i);

    TensorPtr x = add(g, embedding_lookup(g, w.get("embeddings.token"), enc.input_ids),
                      embedding_lookup(g, w.get("embeddings.position"), positions));
    x = add(g, x, embedding_lookup(g, w.get("embeddings.segment"), enc.segment_ids));
    x = layer_norm(g, x, w.get("embeddings.ln.gamma"), w.get("embeddings.ln.beta"));
    x = maybe_dropout(x);

    // Additive key mask: 0 on real tokens, -1e9 on padding.
    TensorPtr key_mask = make_tensor({t_len});
    for (std::size_t i = 0; i < t_len; ++i) {
        key_mask->data[i] = enc.attention_mask[i] != 0 ? 0.0f : -1e9f;
    }

    const std::size_t dh = c.head_dim();
    const float inv_sqrt_dh = 1.0f / std::sqrt(static_cast<float>(dh));
    for (std::size_t l = 0; l < c.num_layers; ++l) {
        const std::string p = "layer" + std::to_string(l);
        TensorPtr q = bias_add(g, matmul(g, x, w.get(p + ".attn.wq")), w.get(p + ".attn.bq"));
        TensorPtr k = bias_add(g, matmul(g, x, w.get(p + ".attn.wk")), w.get(p + ".attn.bk"));
        TensorPtr v = bias_add(g, matmul(g, x, w.get(p + ".attn.wv")), w.get(p + ".attn.bv"));

        std::vector<TensorPtr> heads;
        heads.reserve(c.num_heads);
        for (std::size_t a = 0; a < c.num_heads; ++a) {
            const std::size_t c0 = a * dh, c1 = (a + 1) * dh;
            TensorPtr qh = slice_cols(g, q, c0, c1);
            TensorPtr kh = slice_cols(g, k, c0, c1);
            TensorPtr vh = slice_cols(g, v, c0, c1);
            TensorPtr scores = scale(g, matmul(g, qh, transpose(g, kh)), inv_sqrt_dh);
            TensorPtr probs = softmax(g, bias_add(g, scores, key_mask));
            heads.push_back(matmul(g, probs, vh));
        }
        TensorPtr attn = bias_add(g, matmul(g, concat_cols(g, heads), w.get(p + ".attn.wo")),
                                  w.get(p + ".attn.bo"));
        x = layer_norm(g, add(g, x, maybe_dropout(attn)), w.get(p + ".attn.ln.gamma"),
                       w.get(p + ".attn.ln.beta"));

        TensorPtr ff = bias_add(g, matmul(g, x, w.get(p + ".ffn.w1")), w.get(p + ".ffn.b1"));
        ff = bias_add(g, matmul(g, gelu(g, ff), w.get(p + ".ffn.w2")), w.get(p + ".ffn.b2"));
        x = layer_norm(g, add(g, x, maybe_dropout(ff)), w.get(p + ".ffn.ln.gamma"),
                       w.get(p + ".ffn.ln.beta"));
    }
    return x;  // [T, H]
}

// tanh(W * hidden[0] + b) as a [1, H] row.
inline TensorPtr pool(Graph& g, const TensorPtr& hidden, const ModelWeights& w) {
    TensorPtr cls = embedding_lookup(g, hidden, {0});
    return tanh_op(g, bias_add(g, matmul(g, cls, w.get("pooler.w")), w.get("pooler.b")));
}

// Gather positions, transform (dense+GELU+LN), project onto the tied token
// embedding table plus output bias -> [k, V].  Empty positions give nullptr.
inline TensorPtr mlm_logits(Graph& g, const TensorPtr& hidden, const std::vector<int>& positions,
                            const ModelWeights& w) {
    if (positions.empty()) return nullptr;
    const std::size_t t_len = hidden->dim(0);
    for (const int p : positions) {
        if (p < 0 || static_cast<std::size_t>(p) >= t_len) {
            throw ConfigError("mlm_logits: position " + std::to_string(p) + " out of range");
        }
    }
    TensorPtr h = embedding_lookup(g, hidden, positions);
    h = gelu(g, bias_add(g, matmul(g, h, w.get("mlm.transform.w")), w.get("mlm.transform.b")));
    h = layer_norm(g, h, w.get("mlm.transform.ln.gamma"), w.get("mlm.transform.ln.beta"));
    TensorPtr logits = matmul(g, h, transpose(g, w.get("embeddings.token")));
    return bias_add(g, logits, w.get("mlm.output_bias"));
}

inline TensorPtr nsp_logits(Graph& g, const TensorPtr& pooled, const ModelWeights& w) {
    return bias_add(g, matmul(g, pooled, w.get("nsp.w")), w.get("nsp.b"));
}

inline TensorPtr classify(Graph& g, const TensorPtr& pooled, const ModelWeights& w) {
    return bias_add(g, matmul(g, pooled, w.get("classifier.w")), w.get("classifier.b"));
}

// ---- weight archive ----

namespace archive_detail {

inline void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f32(std::string& out, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
}

class Cursor {
public:
    Cursor(const std::string& buf, std::string origin)
        : buf_(buf), origin_(std::move(origin)) {}

    uint64_t take_uint(std::size_t bytes) {
        need(bytes);
        uint64_t v = 0;
        for (std::size_t i = 0; i < bytes; ++i) {
            v |= static_cast<uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += bytes;
        return v;
    }

    std::string take_bytes(std::size_t n) {
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    void take_f32(float* dst, std::size_t count) {
        need(count * 4);
        for (std::size_t i = 0; i < count; ++i) {
            uint32_t bits = 0;
            for (std::size_t b = 0; b < 4; ++b) {
                bits |= static_cast<uint32_t>(static_cast<unsigned char>(buf_[pos_ + 4 * i + b]))
                        << (8 * b);
            }
            std::memcpy(&dst[i], &bits, 4);
        }
        pos_ += count * 4;
    }

    bool exhausted() const { return pos_ == buf_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) throw ConfigError(origin_ + ": truncated archive");
    }

    const std::string& buf_;
    std::string origin_;
    std::size_t pos_ = 0;
};

inline nlohmann::json config_to_json(const BertConfig& c) {
    return nlohmann::json{{"num_layers", c.num_layers},
                          {"hidden_size", c.hidden_size},
                          {"num_heads", c.num_heads},
                          {"ff_size", c.ff_size},
                          {"vocab_size", c.vocab_size},
                          {"max_positions", c.max_positions},
                          {"segment_types", c.segment_types},
                          {"dropout_rate", c.dropout_rate}};
}

inline BertConfig config_from_json(const nlohmann::json& j, const std::string& origin) {
    BertConfig c;
    try {
        c.num_layers = j.at("num_layers").get<std::size_t>();
        c.hidden_size = j.at("hidden_size").get<std::size_t>();
        c.num_heads = j.at("num_heads").get<std::size_t>();
        c.ff_size = j.at("ff_size").get<std::size_t>();
        c.vocab_size = j.at("vocab_size").get<std::size_t>();
        c.max_positions = j.at("max_positions").get<std::size_t>();
        c.segment_types = j.at("segment_types").get<std::size_t>();
        c.dropout_rate = j.at("dropout_rate").get<float>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": bad config block: " + e.what());
    }
    return c;
}

}  // namespace archive_detail

inline constexpr char kArchiveMagic[4] = {'B', 'T', 'W', 'A'};
inline constexpr uint16_t kArchiveVersion = 1;

inline void save_weights(const ModelWeights& w, const std::string& path) {
    using namespace archive_detail;
    std::string out;
    out.append(kArchiveMagic, 4);
    put_u16(out, kArchiveVersion);
    const std::string config = config_to_json(w.config).dump();
    put_u32(out, static_cast<uint32_t>(config.size()));
    out += config;
    put_u32(out, static_cast<uint32_t>(w.params.size()));
    for (const auto& [name, t] : w.params) {
        put_u16(out, static_cast<uint16_t>(name.size()));
        out += name;
        out.push_back(static_cast<char>(t->rank()));
        for (const std::size_t d : t->shape) put_u64(out, d);
        for (const float v : t->data) put_f32(out, v);
    }
    io::write_file_atomic(path, out);
}

inline ModelWeights load_weights(const std::string& path) {
    using namespace archive_detail;
    const std::string buf = io::read_file(path);
    Cursor cur(buf, path);

    if (cur.take_bytes(4) != std::string(kArchiveMagic, 4)) {
        throw ConfigError(path + ": bad magic, not a weight archive");
    }
    const auto version = static_cast<uint16_t>(cur.take_uint(2));
    if (version != kArchiveVersion) {
        throw ConfigError(path + ": unknown format version " + std::to_string(version));
    }
    const auto config_len = static_cast<std::size_t>(cur.take_uint(4));
    nlohmann::json config_json = nlohmann::json::parse(cur.take_bytes(config_len), nullptr,
                                                       /*allow_exceptions=*/false);
    if (config_json.is_discarded()) throw ConfigError(path + ": bad config block: invalid JSON");
    BertConfig config = config_from_json(config_json, path);
    config.validate();

    const auto count = static_cast<std::size_t>(cur.take_uint(4));
    std::unordered_map<std::string, TensorPtr> loaded;
    for (std::size_t i = 0; i < count; ++i) {
        const auto name_len = static_cast<std::size_t>(cur.take_uint(2));
        const std::string name = cur.take_bytes(name_len);
        const auto rank = static_cast<std::size_t>(cur.take_uint(1));
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(cur.take_uint(8));
        TensorPtr t = make_tensor(shape, /*requires_grad=*/true);
        cur.take_f32(t->data.data(), t->numel());
        if (!loaded.emplace(name, std::move(t)).second) {
            throw ConfigError(path + ": duplicate tensor '" + name + "'");
        }
    }
    if (!cur.exhausted()) throw ConfigError(path + ": trailing bytes after last tensor");

    // Rebuild in canonical order, validating against the recorded config.
    ModelWeights w;
    w.config = config;
    for (const auto& spec : model_detail::param_specs(config)) {
        const auto it = loaded.find(spec.name);
        if (it == loaded.end()) throw ConfigError(path + ": missing tensor '" + spec.name + "'");
        if (it->second->shape != spec.shape) {
            throw ConfigError(path + ": tensor '" + spec.name + "' shape mismatch vs config");
        }
        w.add(spec.name, std::move(it->second));
        loaded.erase(it);
    }
    if (!loaded.empty()) {
        throw ConfigError(path + ": unexpected tensor '" + loaded.begin()->first + "'");
    }
    return w;
}

}  // namespace bertdetect
