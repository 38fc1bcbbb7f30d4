#pragma once

// MLM/NSP pretraining data construction, AdamW optimizer with global-norm
// clipping, the fine-tuning loop, evaluation, and metrics serialization.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "bertdetect/corpus.hpp"
#include "bertdetect/errors.hpp"
#include "bertdetect/io.hpp"
#include "bertdetect/model.hpp"
#include "bertdetect/preprocess.hpp"
#include "bertdetect/rng.hpp"
#include "bertdetect/tensor.hpp"
#include "bertdetect/tokenizer.hpp"

namespace bertdetect {

inline constexpr int kIgnoreIndex = -1;

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 16;
    float learning_rate = 3e-5f;  // fine-tuning default; pretraining runs use 1e-4
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float epsilon = 1e-8f;
    float weight_decay = 0.01f;  // applied to matrices only, never biases/layer-norm
    float grad_clip_norm = 1.0f;
    uint64_t seed = 0;
    std::size_t max_len = 128;
    float mask_ratio = 0.15f;

    void validate() const {
        if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
        if (!(mask_ratio > 0.0f && mask_ratio < 1.0f)) {
            throw ConfigError("train config: mask_ratio must be in (0, 1)");
        }
        if (!(learning_rate > 0.0f)) throw ConfigError("train config: learning_rate must be > 0");
        if (!(grad_clip_norm > 0.0f)) {
            throw ConfigError("train config: grad_clip_norm must be > 0");
        }
    }
};

struct MetricsRecord {
    std::size_t epoch = 0;  // 1-based
    std::string split;      // "train" or "test"
    double loss = 0.0;
    double accuracy = 0.0;
};

struct MaskedExample {
    Encoding encoding;            // ids after [MASK]/random/keep replacement
    std::vector<int> mlm_labels;  // original id at selected positions, kIgnoreIndex elsewhere
    int nsp_label = 0;
};

// ---- masking ----

inline bool has_maskable_position(const Encoding& enc) {
    return std::any_of(enc.input_ids.begin(), enc.input_ids.end(),
                       [](int id) { return id > Vocab::kMask; });
}

// Select k = max(1, round(ratio * eligible)) non-special positions without
// replacement; 80% become [MASK], 10% a random non-special id, 10% stay.
inline MaskedExample mask_tokens(const Encoding& enc, const TrainConfig& cfg, const Vocab& vocab,
                                 Rng& rng) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < enc.input_ids.size(); ++i) {
        if (enc.input_ids[i] > Vocab::kMask) eligible.push_back(i);
    }
    if (eligible.empty()) throw ConfigError("mask_tokens: no eligible positions");

    std::size_t k = static_cast<std::size_t>(
        std::lround(static_cast<double>(cfg.mask_ratio) * static_cast<double>(eligible.size())));
    k = std::min(std::max<std::size_t>(k, 1), eligible.size());

    rng.shuffle(eligible);
    eligible.resize(k);
    std::sort(eligible.begin(), eligible.end());

    MaskedExample out;
    out.encoding = enc;
    out.mlm_labels.assign(enc.input_ids.size(), kIgnoreIndex);
    const int n_regular = vocab.size() - static_cast<int>(kSpecialTokens.size());
    for (const std::size_t pos : eligible) {
        out.mlm_labels[pos] = enc.input_ids[pos];
        const double roll = rng.uniform();
        if (roll < 0.8) {
            out.encoding.input_ids[pos] = Vocab::kMask;
        } else if (roll < 0.9) {
            out.encoding.input_ids[pos] =
                static_cast<int>(kSpecialTokens.size()) +
                static_cast<int>(rng.below(static_cast<uint64_t>(n_regular)));
        }  // else keep the original id
    }
    return out;
}

// ---- NSP pairs ----

// Sentence boundary: '.', '!' or '?' followed by whitespace or end of text.
inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        std::size_t b = 0, e = cur.size();
        while (b < e && std::isspace(static_cast<unsigned char>(cur[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(cur[e - 1]))) --e;
        if (e > b) out.push_back(cur.substr(b, e - b));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        cur += c;
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            flush();
        }
    }
    flush();
    return out;
}

struct NspPair {
    std::string sent_a;
    std::string sent_b;
    int label = 0;  // 1 = consecutive
};

// For every sentence with a successor, draw: positive (the successor) with
// probability 1 - negative_prob, otherwise a random sentence from a
// different document.  negative_prob = 0 forces all-positive pairs.
inline std::vector<NspPair> make_nsp_pairs(const std::vector<std::vector<std::string>>& docs,
                                           Rng& rng, double negative_prob = 0.5) {
    std::vector<NspPair> pairs;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (std::size_t i = 0; i + 1 < docs[d].size(); ++i) {
            if (!rng.bernoulli(negative_prob)) {
                pairs.push_back({docs[d][i], docs[d][i + 1], 1});
                continue;
            }
            std::vector<std::size_t> others;
            for (std::size_t j = 0; j < docs.size(); ++j) {
                if (j != d && !docs[j].empty()) others.push_back(j);
            }
            if (others.empty()) {
                throw ConfigError("make_nsp_pairs: a negative pair needs a second document");
            }
            const std::size_t j = others[rng.below(others.size())];
            pairs.push_back({docs[d][i], docs[j][rng.below(docs[j].size())], 0});
        }
    }
    return pairs;
}

// ---- optimizer ----

struct AdamState {
    std::vector<std::vector<float>> m;  // parallel to ModelWeights::params
    std::vector<std::vector<float>> v;
    std::size_t step_count = 0;
};

inline AdamState init_adam_state(const ModelWeights& w) {
    AdamState st;
    for (const auto& [name, t] : w.params) {
        st.m.emplace_back(t->numel(), 0.0f);
        st.v.emplace_back(t->numel(), 0.0f);
    }
    return st;
}

inline void zero_gradients(ModelWeights& w) {
    for (auto& [name, t] : w.params) {
        t->ensure_grad();
        t->zero_grad();
    }
}

// Adam with bias correction, global-norm clipping, and decoupled weight decay
// on rank >= 2 parameters.  Returns false without touching weights or state
// when any gradient is non-finite.
inline bool adam_step(ModelWeights& w, AdamState& st, const TrainConfig& cfg) {
    if (st.m.size() != w.params.size()) {
        throw ConfigError("adam_step: optimizer state does not match the model");
    }
    double sq = 0.0;
    for (const auto& [name, t] : w.params) {
        if (t->grad.size() != t->numel()) throw ConfigError("adam_step: missing gradients");
        for (const float gv : t->grad) {
            if (!std::isfinite(gv)) return false;
            sq += static_cast<double>(gv) * gv;
        }
    }
    const double norm = std::sqrt(sq);
    const double clip = static_cast<double>(cfg.grad_clip_norm);
    const double cs = norm > clip ? clip / norm : 1.0;

    st.step_count += 1;
    const double bc1 = 1.0 - std::pow(static_cast<double>(cfg.beta1), double(st.step_count));
    const double bc2 = 1.0 - std::pow(static_cast<double>(cfg.beta2), double(st.step_count));
    for (std::size_t p = 0; p < w.params.size(); ++p) {
        Tensor& t = *w.params[p].second;
        const bool decay = t.rank() >= 2;
        for (std::size_t i = 0; i < t.numel(); ++i) {
            const double g = static_cast<double>(t.grad[i]) * cs;
            const double m = cfg.beta1 * st.m[p][i] + (1.0 - cfg.beta1) * g;
            const double v = cfg.beta2 * st.v[p][i] + (1.0 - cfg.beta2) * g * g;
            st.m[p][i] = static_cast<float>(m);
            st.v[p][i] = static_cast<float>(v);
            double update = (m / bc1) / (std::sqrt(v / bc2) + cfg.epsilon);
            if (decay) update += static_cast<double>(cfg.weight_decay) * t.data[i];
            t.data[i] -= static_cast<float>(cfg.learning_rate * update);
        }
    }
    return true;
}

// ---- dataset encoding ----

namespace train_detail {

struct EncodedDataset {
    std::vector<Encoding> encodings;
    std::vector<int> labels;
};

inline EncodedDataset encode_corpus(const Corpus& corpus, const PipelineConfig& pipe,
                                    const Vocab& vocab, std::size_t max_len) {
    EncodedDataset ds;
    for (const auto& doc : corpus.docs) {
        if (doc.label != 0 && doc.label != 1) {
            throw ConfigError("document " + std::to_string(doc.id) + ": label must be 0 or 1");
        }
        const CleanDocument cd = run_pipeline(doc, pipe);
        ds.encodings.push_back(encode(cd.tokens, nullptr, vocab, max_len));
        ds.labels.push_back(doc.label);
    }
    return ds;
}

// Mean cross-entropy of one row of two logits, in double for stable metrics.
inline double binary_ce(float l0, float l1, int label) {
    const double a = l0, b = l1;
    const double mx = std::max(a, b);
    const double lse = mx + std::log(std::exp(a - mx) + std::exp(b - mx));
    return lse - (label == 0 ? a : b);
}

struct EvalTotals {
    double loss = 0.0;
    double accuracy = 0.0;
};

inline EvalTotals evaluate_encoded(const ModelWeights& w, const EncodedDataset& ds) {
    if (ds.encodings.empty()) throw ConfigError("evaluate: empty dataset");
    Rng unused(0);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.encodings.size(); ++i) {
        Graph g;
        g.set_recording(false);
        const TensorPtr hidden = forward_encoder(g, w, ds.encodings[i], /*train=*/false, unused);
        const TensorPtr logits = classify(g, pool(g, hidden, w), w);
        loss_sum += binary_ce(logits->data[0], logits->data[1], ds.labels[i]);
        const int pred = logits->data[1] > logits->data[0] ? 1 : 0;
        if (pred == ds.labels[i]) ++correct;
    }
    const double n = static_cast<double>(ds.encodings.size());
    return {loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace train_detail

// ---- evaluation ----

inline MetricsRecord evaluate(const ModelWeights& w, const Corpus& data,
                              const PipelineConfig& pipe, const Vocab& vocab,
                              const TrainConfig& cfg) {
    if (data.docs.empty()) throw ConfigError("evaluate: empty dataset");
    const auto ds = train_detail::encode_corpus(data, pipe, vocab, cfg.max_len);
    const auto r = train_detail::evaluate_encoded(w, ds);
    return {0, "test", r.loss, r.accuracy};
}

// ---- fine-tuning ----

using EpochCallback = std::function<void(const MetricsRecord&, const MetricsRecord&)>;

// Per epoch: shuffle, minibatch forward/backward/adam_step, then evaluate the
// test split in eval mode.  Returns (train, test) records per epoch, in order.
inline std::vector<MetricsRecord> finetune(const Corpus& train_corpus, const Corpus& test_corpus,
                                           const PipelineConfig& pipe, const Vocab& vocab,
                                           ModelWeights& w, const TrainConfig& cfg,
                                           const EpochCallback& on_epoch = {}) {
    cfg.validate();
    if (train_corpus.docs.empty() || test_corpus.docs.empty()) {
        throw ConfigError("finetune: train and test splits must both be non-empty");
    }
    const auto train_ds = train_detail::encode_corpus(train_corpus, pipe, vocab, cfg.max_len);
    const auto test_ds = train_detail::encode_corpus(test_corpus, pipe, vocab, cfg.max_len);

    Rng master(cfg.seed);
    Rng shuffle_rng = master.fork();
    Rng dropout_rng = master.fork();
    AdamState st = init_adam_state(w);

    const std::size_t n = train_ds.encodings.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<MetricsRecord> records;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            Graph g;
            std::vector<TensorPtr> rows;
            std::vector<int> targets;
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t i = order[b];
                const TensorPtr hidden =
                    forward_encoder(g, w, train_ds.encodings[i], /*train=*/true, dropout_rng);
                rows.push_back(classify(g, pool(g, hidden, w), w));
                targets.push_back(train_ds.labels[i]);
            }
            const TensorPtr logits = concat_rows(g, rows);
            const TensorPtr loss = cross_entropy(g, logits, targets);
            if (!std::isfinite(loss->data[0])) {
                throw NumericError("finetune: non-finite loss at epoch " + std::to_string(epoch));
            }
            zero_gradients(w);
            g.backward(loss);
            if (!adam_step(w, st, cfg)) {
                std::fprintf(stderr, "warning: non-finite gradient, step skipped\n");
            }
            loss_sum += static_cast<double>(loss->data[0]) * static_cast<double>(stop - start);
            for (std::size_t r = 0; r < targets.size(); ++r) {
                const int pred = logits->data[2 * r + 1] > logits->data[2 * r] ? 1 : 0;
                if (pred == targets[r]) ++correct;
            }
        }
        const MetricsRecord train_rec{epoch, "train", loss_sum / static_cast<double>(n),
                                      static_cast<double>(correct) / static_cast<double>(n)};
        const auto e = train_detail::evaluate_encoded(w, test_ds);
        const MetricsRecord test_rec{epoch, "test", e.loss, e.accuracy};
        records.push_back(train_rec);
        records.push_back(test_rec);
        if (on_epoch) on_epoch(train_rec, test_rec);
    }
    return records;
}

// ---- pretraining ----

// Sentence pairs from raw document text; per epoch, fresh masking draws.
// Loss = MLM cross-entropy (over masked positions) + NSP cross-entropy;
// the accuracy column reports MLM top-1 accuracy.
inline std::vector<MetricsRecord> pretrain(
    const Corpus& corpus, const PipelineConfig& pipe, const Vocab& vocab, ModelWeights& w,
    const TrainConfig& cfg, const std::function<void(const MetricsRecord&)>& on_epoch = {}) {
    cfg.validate();
    if (corpus.docs.empty()) throw ConfigError("pretrain: empty corpus");

    std::vector<std::vector<std::string>> doc_sentences;
    std::size_t total_sentences = 0;
    for (const auto& doc : corpus.docs) {
        doc_sentences.push_back(split_sentences(doc.text));
        total_sentences += doc_sentences.back().size();
    }
    if (total_sentences < 2) throw ConfigError("pretrain: corpus yields fewer than 2 sentences");

    Rng master(cfg.seed);
    Rng pair_rng = master.fork();
    Rng mask_rng = master.fork();
    Rng shuffle_rng = master.fork();
    Rng dropout_rng = master.fork();

    const std::vector<NspPair> pairs = make_nsp_pairs(doc_sentences, pair_rng);
    struct Example {
        Encoding enc;
        int nsp = 0;
    };
    std::vector<Example> examples;
    for (const NspPair& pr : pairs) {
        const auto tokens_a = run_pipeline({0, pr.sent_a, 0}, pipe).tokens;
        const auto tokens_b = run_pipeline({0, pr.sent_b, 0}, pipe).tokens;
        const Encoding enc = encode(tokens_a, &tokens_b, vocab, cfg.max_len);
        if (has_maskable_position(enc)) examples.push_back({enc, pr.label});
    }
    if (examples.empty()) {
        throw ConfigError("pretrain: no usable sentence pairs (documents need consecutive "
                          "sentences with in-vocabulary tokens)");
    }

    AdamState st = init_adam_state(w);
    const std::size_t n = examples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<MetricsRecord> records;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t mlm_correct = 0, mlm_total = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            Graph g;
            std::vector<TensorPtr> nsp_rows, mlm_rows;
            std::vector<int> nsp_targets, mlm_targets;
            for (std::size_t b = start; b < stop; ++b) {
                const Example& ex = examples[order[b]];
                const MaskedExample mx = mask_tokens(ex.enc, cfg, vocab, mask_rng);
                const TensorPtr hidden =
                    forward_encoder(g, w, mx.encoding, /*train=*/true, dropout_rng);
                nsp_rows.push_back(nsp_logits(g, pool(g, hidden, w), w));
                nsp_targets.push_back(ex.nsp);
                std::vector<int> positions;
                for (std::size_t i = 0; i < mx.mlm_labels.size(); ++i) {
                    if (mx.mlm_labels[i] != kIgnoreIndex) {
                        positions.push_back(static_cast<int>(i));
                        mlm_targets.push_back(mx.mlm_labels[i]);
                    }
                }
                mlm_rows.push_back(mlm_logits(g, hidden, positions, w));
            }
            const TensorPtr mlm_l = concat_rows(g, mlm_rows);
            const TensorPtr loss = add(g, cross_entropy(g, mlm_l, mlm_targets),
                                       cross_entropy(g, concat_rows(g, nsp_rows), nsp_targets));
            if (!std::isfinite(loss->data[0])) {
                throw NumericError("pretrain: non-finite loss at epoch " + std::to_string(epoch));
            }
            zero_gradients(w);
            g.backward(loss);
            if (!adam_step(w, st, cfg)) {
                std::fprintf(stderr, "warning: non-finite gradient, step skipped\n");
            }
            loss_sum += static_cast<double>(loss->data[0]) * static_cast<double>(stop - start);

            const std::size_t v = static_cast<std::size_t>(vocab.size());
            for (std::size_t r = 0; r < mlm_targets.size(); ++r) {
                const float* row = &mlm_l->data[r * v];
                std::size_t best = 0;
                for (std::size_t j = 1; j < v; ++j) {
                    if (row[j] > row[best]) best = j;
                }
                if (static_cast<int>(best) == mlm_targets[r]) ++mlm_correct;
            }
            mlm_total += mlm_targets.size();
        }
        const MetricsRecord rec{epoch, "train", loss_sum / static_cast<double>(n),
                                static_cast<double>(mlm_correct) / static_cast<double>(mlm_total)};
        records.push_back(rec);
        if (on_epoch) on_epoch(rec);
    }
    return records;
}

// ---- summaries & metrics files ----

struct Summary {
    bool has_train = false;
    bool has_test = false;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;
    double accuracy_gap = 0.0;  // train - test, meaningful when both splits present
};

inline Summary summarize(const std::vector<MetricsRecord>& records) {
    if (records.empty()) throw ConfigError("summarize: no records");
    Summary s;
    std::size_t n_train = 0, n_test = 0;
    for (const auto& r : records) {
        if (r.split == "train") {
            s.train_loss += r.loss;
            s.train_accuracy += r.accuracy;
            ++n_train;
        } else if (r.split == "test") {
            s.test_loss += r.loss;
            s.test_accuracy += r.accuracy;
            ++n_test;
        } else {
            throw ConfigError("summarize: unknown split '" + r.split + "'");
        }
    }
    if (n_train > 0) {
        s.has_train = true;
        s.train_loss /= static_cast<double>(n_train);
        s.train_accuracy /= static_cast<double>(n_train);
    }
    if (n_test > 0) {
        s.has_test = true;
        s.test_loss /= static_cast<double>(n_test);
        s.test_accuracy /= static_cast<double>(n_test);
    }
    if (s.has_train && s.has_test) s.accuracy_gap = s.train_accuracy - s.test_accuracy;
    return s;
}

inline std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
    std::string out = "epoch,split,loss,accuracy\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%zu,%s,%.6f,%.4f\n", r.epoch, r.split.c_str(), r.loss,
                      r.accuracy);
        out += buf;
    }
    return out;
}

inline void write_metrics_csv(const std::string& path,
                              const std::vector<MetricsRecord>& records) {
    io::write_file_atomic(path, metrics_to_csv(records));
}

inline nlohmann::json summary_to_json(const Summary& s) {
    nlohmann::json j;
    if (s.has_train) {
        j["train"] = {{"loss", s.train_loss}, {"accuracy", s.train_accuracy}};
    }
    if (s.has_test) {
        j["test"] = {{"loss", s.test_loss}, {"accuracy", s.test_accuracy}};
    }
    if (s.has_train && s.has_test) j["accuracy_gap"] = s.accuracy_gap;
    return j;
}

}  // namespace bertdetect
