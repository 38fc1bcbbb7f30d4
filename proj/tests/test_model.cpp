#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <bertdetect/errors.hpp>
#include <bertdetect/io.hpp>
#include <bertdetect/model.hpp>
#include <bertdetect/rng.hpp>
#include <bertdetect/tensor.hpp>
#include <bertdetect/tokenizer.hpp>

#include "reference_model.hpp"
#include "reference_ops.hpp"
#include "support.hpp"

using namespace bertdetect;
using refops::Vec;

namespace {

// [CLS] a b [SEP] c [SEP] with two pad slots; exercises segments and masking.
Encoding pair_encoding() {
    Encoding enc;
    enc.input_ids = {2, 10, 11, 3, 12, 3, 0, 0};
    enc.segment_ids = {0, 0, 0, 0, 1, 1, 1, 1};
    enc.attention_mask = {1, 1, 1, 1, 1, 1, 0, 0};
    return enc;
}

double max_rel_err(const TensorPtr& got, const Vec& want) {
    REQUIRE(got->data.size() == want.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        worst = std::max(worst, refops::grad_error(got->data[i], want[i]));
    }
    return worst;
}

// Central finite difference of `loss` with respect to every model parameter,
// compared against the engine gradients already stored in the tensors.
double fd_worst_error(ModelWeights& w, const std::function<double()>& loss) {
    constexpr double h = 1e-3;
    double worst = 0.0;
    for (auto& [name, t] : w.params) {
        for (std::size_t i = 0; i < t->numel(); ++i) {
            const float saved = t->data[i];
            t->data[i] = static_cast<float>(saved + h);
            const double up = loss();
            t->data[i] = static_cast<float>(saved - h);
            const double down = loss();
            t->data[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            // Params the loss never touches keep an empty grad; treat as zero.
            const float engine = i < t->grad.size() ? t->grad[i] : 0.0f;
            worst = std::max(worst, refops::grad_error(engine, fd));
        }
    }
    return worst;
}

}  // namespace

// ---- initialization ----

TEST_CASE("init_model draws clipped normals and structured constants") {
    const ModelWeights w = init_model(testsup::tiny_config(), 42);
    REQUIRE(w.params.size() == 48);

    const TensorPtr tok = w.get("embeddings.token");
    double mean = 0.0;
    for (const float v : tok->data) {
        REQUIRE(std::fabs(v) <= 0.04f);
        mean += v;
    }
    mean /= static_cast<double>(tok->numel());
    double var = 0.0;
    for (const float v : tok->data) var += (v - mean) * (v - mean);
    const double stddev = std::sqrt(var / static_cast<double>(tok->numel()));
    REQUIRE(std::fabs(mean) < 0.005);
    REQUIRE(stddev > 0.012);
    REQUIRE(stddev < 0.022);

    for (const float v : w.get("embeddings.ln.gamma")->data) REQUIRE(v == 1.0f);
    for (const float v : w.get("layer0.attn.bq")->data) REQUIRE(v == 0.0f);
    for (const float v : w.get("mlm.output_bias")->data) REQUIRE(v == 0.0f);
    for (const auto& [name, t] : w.params) REQUIRE(t->requires_grad);
}

TEST_CASE("init_model is seed deterministic") {
    const ModelWeights a = init_model(testsup::tiny_config(), 7);
    const ModelWeights b = init_model(testsup::tiny_config(), 7);
    const ModelWeights c = init_model(testsup::tiny_config(), 8);
    bool differs = false;
    for (std::size_t p = 0; p < a.params.size(); ++p) {
        REQUIRE(a.params[p].first == b.params[p].first);
        REQUIRE(a.params[p].second->data == b.params[p].second->data);
        differs = differs || a.params[p].second->data != c.params[p].second->data;
    }
    REQUIRE(differs);
}

TEST_CASE("parameter table covers the full architecture") {
    const ModelWeights w = init_model(testsup::tiny_config(), 1);
    const auto shape_of = [&](const char* name) { return w.get(name)->shape; };
    REQUIRE(shape_of("embeddings.token") == std::vector<std::size_t>{32, 8});
    REQUIRE(shape_of("embeddings.position") == std::vector<std::size_t>{16, 8});
    REQUIRE(shape_of("embeddings.segment") == std::vector<std::size_t>{2, 8});
    REQUIRE(shape_of("layer0.attn.wq") == std::vector<std::size_t>{8, 8});
    REQUIRE(shape_of("layer1.attn.bo") == std::vector<std::size_t>{8});
    REQUIRE(shape_of("layer0.ffn.w1") == std::vector<std::size_t>{8, 16});
    REQUIRE(shape_of("layer0.ffn.w2") == std::vector<std::size_t>{16, 8});
    REQUIRE(shape_of("pooler.w") == std::vector<std::size_t>{8, 8});
    REQUIRE(shape_of("mlm.transform.ln.beta") == std::vector<std::size_t>{8});
    REQUIRE(shape_of("mlm.output_bias") == std::vector<std::size_t>{32});
    REQUIRE(shape_of("nsp.w") == std::vector<std::size_t>{8, 2});
    REQUIRE(shape_of("classifier.w") == std::vector<std::size_t>{8, 2});
    REQUIRE(shape_of("classifier.b") == std::vector<std::size_t>{2});
    REQUIRE_FALSE(w.has("layer2.attn.wq"));
}

TEST_CASE("model config validation") {
    BertConfig c = testsup::tiny_config();
    c.hidden_size = 9;  // not divisible by 2 heads
    REQUIRE_THROWS_AS(init_model(c, 1), ConfigError);
    c = testsup::tiny_config();
    c.vocab_size = 0;
    REQUIRE_THROWS_AS(init_model(c, 1), ConfigError);
    c = testsup::tiny_config();
    c.dropout_rate = 1.0f;
    REQUIRE_THROWS_AS(init_model(c, 1), ConfigError);
}

// ---- forward pass vs the independent reference ----

TEST_CASE("encoder forward matches the f64 reference") {
    const ModelWeights w = init_model(testsup::tiny_config(), 11);
    const Encoding enc = pair_encoding();
    Graph g;
    g.set_recording(false);
    Rng drop(1);
    const TensorPtr hidden = forward_encoder(g, w, enc, /*train_mode=*/false, drop);
    REQUIRE(hidden->shape == std::vector<std::size_t>{8, 8});
    REQUIRE(max_rel_err(hidden, refmodel::encoder(w, enc)) < 1e-5);
}

TEST_CASE("heads match the f64 reference") {
    const ModelWeights w = init_model(testsup::tiny_config(), 12);
    const Encoding enc = pair_encoding();
    Graph g;
    g.set_recording(false);
    Rng drop(1);
    const TensorPtr hidden = forward_encoder(g, w, enc, false, drop);
    const Vec ref_hidden = refmodel::encoder(w, enc);

    const TensorPtr pooled_t = pool(g, hidden, w);
    REQUIRE(pooled_t->shape == std::vector<std::size_t>{1, 8});
    const Vec ref_pooled = refmodel::pooled(w, ref_hidden);
    REQUIRE(max_rel_err(pooled_t, ref_pooled) < 1e-5);

    const TensorPtr cls = classify(g, pooled_t, w);
    REQUIRE(cls->shape == std::vector<std::size_t>{1, 2});
    REQUIRE(max_rel_err(cls, refmodel::class_logits(w, ref_pooled)) < 1e-5);

    const TensorPtr nsp = nsp_logits(g, pooled_t, w);
    REQUIRE(nsp->shape == std::vector<std::size_t>{1, 2});
    REQUIRE(max_rel_err(nsp, refmodel::nsp_logits(w, ref_pooled)) < 1e-5);

    const std::vector<int> positions = {1, 4};
    const TensorPtr mlm = mlm_logits(g, hidden, positions, w);
    REQUIRE(mlm->shape == std::vector<std::size_t>{2, 32});
    REQUIRE(max_rel_err(mlm, refmodel::mlm_logits(w, ref_hidden, positions)) < 1e-5);
}

TEST_CASE("padding does not change real-token activations") {
    const ModelWeights w = init_model(testsup::tiny_config(), 13);
    Encoding short_enc;
    short_enc.input_ids = {2, 10, 11, 12, 13, 3};
    short_enc.segment_ids = {0, 0, 0, 0, 0, 0};
    short_enc.attention_mask = {1, 1, 1, 1, 1, 1};
    Encoding long_enc = short_enc;
    for (int i = 0; i < 4; ++i) {
        long_enc.input_ids.push_back(0);
        long_enc.segment_ids.push_back(0);
        long_enc.attention_mask.push_back(0);
    }

    Graph g;
    g.set_recording(false);
    Rng drop(1);
    const TensorPtr hidden_s = forward_encoder(g, w, short_enc, false, drop);
    const TensorPtr hidden_l = forward_encoder(g, w, long_enc, false, drop);
    double worst = 0.0;
    for (std::size_t i = 0; i < 6 * 8; ++i) {
        worst = std::max(worst,
                         static_cast<double>(std::fabs(hidden_s->data[i] - hidden_l->data[i])));
    }
    REQUIRE(worst <= 1e-5);

    const TensorPtr logits_s = classify(g, pool(g, hidden_s, w), w);
    const TensorPtr logits_l = classify(g, pool(g, hidden_l, w), w);
    REQUIRE(std::fabs(logits_s->data[0] - logits_l->data[0]) <= 1e-5f);
    REQUIRE(std::fabs(logits_s->data[1] - logits_l->data[1]) <= 1e-5f);
}

TEST_CASE("eval forward is deterministic and dropout only runs in train mode") {
    const ModelWeights w = init_model(testsup::tiny_config(), 14);
    const Encoding enc = pair_encoding();
    Graph g;
    g.set_recording(false);
    Rng r1(5), r2(5), r3(5);
    const TensorPtr a = forward_encoder(g, w, enc, false, r1);
    const TensorPtr b = forward_encoder(g, w, enc, false, r2);
    REQUIRE(a->data == b->data);
    REQUIRE(r1.next_u64() == r2.next_u64());  // eval consumed no randomness
    const TensorPtr t = forward_encoder(g, w, enc, true, r3);
    REQUIRE(a->data != t->data);
}

TEST_CASE("forward_encoder validates the encoding") {
    const ModelWeights w = init_model(testsup::tiny_config(), 15);
    Graph g;
    Rng drop(1);
    REQUIRE_THROWS_AS(forward_encoder(g, w, Encoding{}, false, drop), ConfigError);

    Encoding too_long;
    too_long.input_ids.assign(17, 5);  // max_positions is 16
    too_long.segment_ids.assign(17, 0);
    too_long.attention_mask.assign(17, 1);
    REQUIRE_THROWS_AS(forward_encoder(g, w, too_long, false, drop), ConfigError);

    Encoding ragged = pair_encoding();
    ragged.segment_ids.pop_back();
    REQUIRE_THROWS_AS(forward_encoder(g, w, ragged, false, drop), ConfigError);
}

TEST_CASE("mlm_logits handles empty and invalid positions") {
    const ModelWeights w = init_model(testsup::tiny_config(), 16);
    Graph g;
    g.set_recording(false);
    Rng drop(1);
    const TensorPtr hidden = forward_encoder(g, w, pair_encoding(), false, drop);
    REQUIRE(mlm_logits(g, hidden, {}, w) == nullptr);
    REQUIRE_THROWS_AS(mlm_logits(g, hidden, {8}, w), ConfigError);
    REQUIRE_THROWS_AS(mlm_logits(g, hidden, {-1}, w), ConfigError);
}

// ---- end-to-end gradients ----

TEST_CASE("classification loss gradients survive the full stack") {
    ModelWeights w = init_model(testsup::tiny_config(), 21);
    const Encoding enc = pair_encoding();
    const int label = 1;

    Graph g;
    Rng drop(1);
    const TensorPtr hidden = forward_encoder(g, w, enc, false, drop);
    const TensorPtr loss = cross_entropy(g, classify(g, pool(g, hidden, w), w), {label});
    g.backward(loss);

    const double worst =
        fd_worst_error(w, [&] { return refmodel::classify_loss(w, enc, label); });
    REQUIRE(worst < 1e-3);
}

TEST_CASE("joint MLM and NSP loss gradients survive the full stack") {
    ModelWeights w = init_model(testsup::tiny_config(), 22);
    Encoding enc = pair_encoding();
    enc.input_ids[1] = 4;  // [MASK]
    const std::vector<int> positions = {1};
    const std::vector<int> targets = {10};
    const int nsp_label = 0;

    Graph g;
    Rng drop(1);
    const TensorPtr hidden = forward_encoder(g, w, enc, false, drop);
    const TensorPtr pooled_t = pool(g, hidden, w);
    const TensorPtr nsp_loss = cross_entropy(g, nsp_logits(g, pooled_t, w), {nsp_label});
    const TensorPtr mlm_loss = cross_entropy(g, mlm_logits(g, hidden, positions, w), targets);
    const TensorPtr loss = add(g, nsp_loss, mlm_loss);
    g.backward(loss);

    const double worst = fd_worst_error(
        w, [&] { return refmodel::pretrain_loss(w, enc, positions, targets, nsp_label); });
    REQUIRE(worst < 1e-3);
}

// ---- weight archive ----

TEST_CASE("archive round trip is bit exact") {
    const std::string dir = testsup::temp_dir("model");
    const std::string path = dir + "/roundtrip.btwa";
    const ModelWeights w = init_model(testsup::tiny_config(), 31);
    save_weights(w, path);
    const ModelWeights r = load_weights(path);

    REQUIRE(r.config.num_layers == w.config.num_layers);
    REQUIRE(r.config.hidden_size == w.config.hidden_size);
    REQUIRE(r.config.num_heads == w.config.num_heads);
    REQUIRE(r.config.ff_size == w.config.ff_size);
    REQUIRE(r.config.vocab_size == w.config.vocab_size);
    REQUIRE(r.config.max_positions == w.config.max_positions);
    REQUIRE(r.config.segment_types == w.config.segment_types);
    REQUIRE(r.config.dropout_rate == w.config.dropout_rate);

    REQUIRE(r.params.size() == w.params.size());
    for (std::size_t i = 0; i < w.params.size(); ++i) {
        REQUIRE(r.params[i].first == w.params[i].first);
        REQUIRE(r.params[i].second->shape == w.params[i].second->shape);
        REQUIRE(r.params[i].second->data == w.params[i].second->data);
        REQUIRE(r.params[i].second->requires_grad);
    }

    // Saving the loaded weights reproduces the file byte for byte.
    const std::string path2 = dir + "/roundtrip2.btwa";
    save_weights(r, path2);
    REQUIRE(io::read_file(path) == io::read_file(path2));
}

TEST_CASE("archive loading rejects corruption") {
    const std::string dir = testsup::temp_dir("model");
    const std::string good_path = dir + "/good.btwa";
    const ModelWeights w = init_model(testsup::tiny_config(), 32);
    save_weights(w, good_path);
    const std::string good = io::read_file(good_path);

    const auto expect_reject = [&](const std::string& tag, std::string bytes) {
        const std::string path = dir + "/" + tag + ".btwa";
        io::write_file_atomic(path, bytes);
        REQUIRE_THROWS_AS(load_weights(path), ConfigError);
    };

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    expect_reject("magic", bad_magic);

    std::string bad_version = good;
    bad_version[4] = 2;
    expect_reject("version", bad_version);

    expect_reject("truncated", good.substr(0, good.size() - 10));
    expect_reject("header_only", good.substr(0, 3));
    expect_reject("trailing", good + std::string(4, '\0'));

    std::string bad_json = good;
    bad_json[10] = 'X';  // first byte of the config block
    expect_reject("json", bad_json);

    ModelWeights dup = init_model(testsup::tiny_config(), 32);
    dup.params.emplace_back("nsp.b", make_tensor({2}));
    const std::string dup_path = dir + "/dup.btwa";
    save_weights(dup, dup_path);
    REQUIRE_THROWS_AS(load_weights(dup_path), ConfigError);

    ModelWeights extra = init_model(testsup::tiny_config(), 32);
    extra.params.emplace_back("rogue.tensor", make_tensor({2}));
    const std::string extra_path = dir + "/extra.btwa";
    save_weights(extra, extra_path);
    REQUIRE_THROWS_AS(load_weights(extra_path), ConfigError);

    ModelWeights missing = init_model(testsup::tiny_config(), 32);
    missing.params.pop_back();
    const std::string missing_path = dir + "/missing.btwa";
    save_weights(missing, missing_path);
    REQUIRE_THROWS_AS(load_weights(missing_path), ConfigError);

    ModelWeights reshaped = init_model(testsup::tiny_config(), 32);
    reshaped.params.back().second = make_tensor({3});  // classifier.b should be {2}
    const std::string reshaped_path = dir + "/reshaped.btwa";
    save_weights(reshaped, reshaped_path);
    REQUIRE_THROWS_AS(load_weights(reshaped_path), ConfigError);

    std::filesystem::remove_all(dir);
}

TEST_CASE("golden archive checksums are stable") {
    const ModelWeights w = load_weights(testsup::data_path("golden_weights.btwa"));
    REQUIRE(w.config.num_layers == 2);
    REQUIRE(w.config.hidden_size == 8);
    REQUIRE(w.config.num_heads == 2);
    REQUIRE(w.config.ff_size == 16);
    REQUIRE(w.config.vocab_size == 32);
    REQUIRE(w.config.max_positions == 16);

    const std::map<std::string, std::uint64_t> expected = {
        {"embeddings.token", 0xac17d86b806e1434ull},
        {"embeddings.position", 0xc8a75edaeb6139d2ull},
        {"embeddings.segment", 0x72ee66aea7bf738eull},
        {"embeddings.ln.gamma", 0xb05bc048b7becac3ull},
        {"embeddings.ln.beta", 0x171bb79dc8e18503ull},
        {"layer0.attn.wq", 0xe1ff196f2065bd31ull},
        {"layer0.attn.wk", 0x9b9881c078e65a8bull},
        {"layer0.attn.wv", 0x77109ed8694289abull},
        {"layer0.attn.wo", 0x7d586c9ccc2562f3ull},
        {"layer0.attn.bq", 0x171bb79dc8e18503ull},
        {"layer0.attn.bk", 0x171bb79dc8e18503ull},
        {"layer0.attn.bv", 0x171bb79dc8e18503ull},
        {"layer0.attn.bo", 0x171bb79dc8e18503ull},
        {"layer0.attn.ln.gamma", 0xb05bc048b7becac3ull},
        {"layer0.attn.ln.beta", 0x171bb79dc8e18503ull},
        {"layer0.ffn.w1", 0xf70647108a350826ull},
        {"layer0.ffn.b1", 0xeebe4e4e51c6c683ull},
        {"layer0.ffn.w2", 0xdd380d9019105a67ull},
        {"layer0.ffn.b2", 0x171bb79dc8e18503ull},
        {"layer0.ffn.ln.gamma", 0xb05bc048b7becac3ull},
        {"layer0.ffn.ln.beta", 0x171bb79dc8e18503ull},
        {"layer1.attn.wq", 0x1a6a8250618d47cdull},
        {"layer1.attn.wk", 0x765c13dd924f8c85ull},
        {"layer1.attn.wv", 0x54ec04f6b039ee03ull},
        {"layer1.attn.wo", 0x429ad0683187ed4cull},
        {"layer1.attn.bq", 0x171bb79dc8e18503ull},
        {"layer1.attn.bk", 0x171bb79dc8e18503ull},
        {"layer1.attn.bv", 0x171bb79dc8e18503ull},
        {"layer1.attn.bo", 0x171bb79dc8e18503ull},
        {"layer1.attn.ln.gamma", 0xb05bc048b7becac3ull},
        {"layer1.attn.ln.beta", 0x171bb79dc8e18503ull},
        {"layer1.ffn.w1", 0xbda17b19abf4fbf8ull},
        {"layer1.ffn.b1", 0xeebe4e4e51c6c683ull},
        {"layer1.ffn.w2", 0xe2861d738cb73dafull},
        {"layer1.ffn.b2", 0x171bb79dc8e18503ull},
        {"layer1.ffn.ln.gamma", 0xb05bc048b7becac3ull},
        {"layer1.ffn.ln.beta", 0x171bb79dc8e18503ull},
        {"pooler.w", 0x6db1807694a17044ull},
        {"pooler.b", 0x171bb79dc8e18503ull},
        {"mlm.transform.w", 0x71ab5ef76de4f588ull},
        {"mlm.transform.b", 0x171bb79dc8e18503ull},
        {"mlm.transform.ln.gamma", 0xb05bc048b7becac3ull},
        {"mlm.transform.ln.beta", 0x171bb79dc8e18503ull},
        {"mlm.output_bias", 0x306c537b2ff38983ull},
        {"nsp.w", 0x23fccf20c69caa5eull},
        {"nsp.b", 0x47fe0d7eaf8e51e3ull},
        {"classifier.w", 0xf928583ad127ca1aull},
        {"classifier.b", 0x47fe0d7eaf8e51e3ull},
    };
    REQUIRE(w.params.size() == expected.size());
    for (const auto& [name, t] : w.params) {
        INFO("tensor " << name);
        REQUIRE(expected.count(name) == 1);
        REQUIRE(testsup::fnv1a64(t->data.data(), t->numel()) == expected.at(name));
    }
}
