// Command-line front end wiring the toolkit end to end: corpus statistics,
// preprocessing, vocabulary construction, train/test splitting, MLM/NSP
// pretraining, fine-tuning, evaluation, and prediction.
//
// Exit codes: 0 success, 1 configuration/input errors, 2 numeric failures.
// Config precedence per key: CLI flag > config file > built-in default.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <bertdetect/corpus.hpp>
#include <bertdetect/csv.hpp>
#include <bertdetect/errors.hpp>
#include <bertdetect/io.hpp>
#include <bertdetect/model.hpp>
#include <bertdetect/preprocess.hpp>
#include <bertdetect/rng.hpp>
#include <bertdetect/stopwords.hpp>
#include <bertdetect/tensor.hpp>
#include <bertdetect/tokenizer.hpp>
#include <bertdetect/training.hpp>

namespace bd = bertdetect;
using nlohmann::json;

namespace {

struct Paths {
    std::string corpus;
    std::string vocab;
    std::string weights;
    std::string init_weights;
    std::string out_dir = ".";
};

struct RunConfig {
    bd::SplitSpec split;
    bd::PipelineConfig pipe;
    bd::BertConfig model;
    bd::TrainConfig train;
    Paths paths;
    bool lr_explicit = false;  // pretrain defaults to 1e-4 unless the LR was set
};

// ---- config file ----

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || item.key() == a;
        if (!known) {
            const std::string prefix = section.empty() ? "" : section + ".";
            throw bd::ConfigError("config: unknown key '" + prefix + item.key() + "'");
        }
    }
}

template <typename T>
void fetch(const json& obj, const char* key, T& out, const std::string& section) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw bd::ConfigError("config: bad value for '" + section + "." + key + "'");
    }
}

std::vector<bd::Step> parse_step_names(const std::vector<std::string>& names) {
    std::vector<bd::Step> steps;
    for (const auto& n : names) steps.push_back(bd::parse_step(n));
    return steps;
}

RunConfig load_run_config(const std::string& path) {
    const json j = json::parse(bd::io::read_file(path), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
        throw bd::ConfigError(path + ": config must be a JSON object");
    }
    check_keys(j, "", {"split", "pipeline", "model", "train", "paths"});
    RunConfig rc;
    if (j.contains("split")) {
        const json& s = j.at("split");
        check_keys(s, "split", {"train_fraction", "seed", "stratified"});
        fetch(s, "train_fraction", rc.split.train_fraction, "split");
        fetch(s, "seed", rc.split.seed, "split");
        fetch(s, "stratified", rc.split.stratified, "split");
    }
    if (j.contains("pipeline")) {
        const json& p = j.at("pipeline");
        check_keys(p, "pipeline", {"steps", "stopwords_path"});
        if (p.contains("steps")) {
            std::vector<std::string> names;
            fetch(p, "steps", names, "pipeline");
            rc.pipe.steps = parse_step_names(names);
        }
        std::string stopwords_path;
        fetch(p, "stopwords_path", stopwords_path, "pipeline");
        if (!stopwords_path.empty()) rc.pipe.stopword_list = bd::load_stopwords(stopwords_path);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model",
                   {"num_layers", "hidden_size", "num_heads", "ff_size", "vocab_size",
                    "max_positions", "segment_types", "dropout_rate"});
        fetch(m, "num_layers", rc.model.num_layers, "model");
        fetch(m, "hidden_size", rc.model.hidden_size, "model");
        fetch(m, "num_heads", rc.model.num_heads, "model");
        fetch(m, "ff_size", rc.model.ff_size, "model");
        fetch(m, "vocab_size", rc.model.vocab_size, "model");
        fetch(m, "max_positions", rc.model.max_positions, "model");
        fetch(m, "segment_types", rc.model.segment_types, "model");
        fetch(m, "dropout_rate", rc.model.dropout_rate, "model");
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        check_keys(t, "train",
                   {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon",
                    "weight_decay", "grad_clip_norm", "seed", "max_len", "mask_ratio"});
        fetch(t, "epochs", rc.train.epochs, "train");
        fetch(t, "batch_size", rc.train.batch_size, "train");
        fetch(t, "learning_rate", rc.train.learning_rate, "train");
        fetch(t, "beta1", rc.train.beta1, "train");
        fetch(t, "beta2", rc.train.beta2, "train");
        fetch(t, "epsilon", rc.train.epsilon, "train");
        fetch(t, "weight_decay", rc.train.weight_decay, "train");
        fetch(t, "grad_clip_norm", rc.train.grad_clip_norm, "train");
        fetch(t, "seed", rc.train.seed, "train");
        fetch(t, "max_len", rc.train.max_len, "train");
        fetch(t, "mask_ratio", rc.train.mask_ratio, "train");
        rc.lr_explicit = t.contains("learning_rate");
    }
    if (j.contains("paths")) {
        const json& p = j.at("paths");
        check_keys(p, "paths", {"corpus", "vocab", "weights", "init_weights", "out_dir"});
        fetch(p, "corpus", rc.paths.corpus, "paths");
        fetch(p, "vocab", rc.paths.vocab, "paths");
        fetch(p, "weights", rc.paths.weights, "paths");
        fetch(p, "init_weights", rc.paths.init_weights, "paths");
        fetch(p, "out_dir", rc.paths.out_dir, "paths");
    }
    return rc;
}

// ---- flags ----

struct Flags {
    std::string config_path;
    std::string corpus, vocab, weights, init_weights, out_dir, out;
    std::string steps_csv, stopwords_path;
    std::string text, file;
    double train_fraction = 0.6;
    uint64_t split_seed = 0;
    bool stratified = false;
    uint64_t num_layers = 4, hidden_size = 128, num_heads = 4, ff_size = 512;
    uint64_t max_positions = 128;
    double dropout = 0.1;
    uint64_t epochs = 10, batch_size = 16, max_len = 128;
    double learning_rate = 3e-5, mask_ratio = 0.15, weight_decay = 0.01, grad_clip = 1.0;
    uint64_t seed = 0;
    uint64_t target_size = 1000, min_frequency = 1;
};

void add_config_flag(CLI::App* c, Flags& f) {
    c->add_option("--config", f.config_path, "JSON config file (flags override it)");
}

void add_io_flags(CLI::App* c, Flags& f, bool vocab = false, bool weights = false) {
    c->add_option("--corpus", f.corpus, "input corpus CSV (text,generated)");
    c->add_option("--out-dir", f.out_dir, "output directory (default '.')");
    if (vocab) c->add_option("--vocab", f.vocab, "vocabulary file");
    if (weights) c->add_option("--weights", f.weights, "weight archive path");
}

void add_pipeline_flags(CLI::App* c, Flags& f) {
    c->add_option("--steps", f.steps_csv,
                  "comma-separated pipeline steps; empty string disables all");
    c->add_option("--stopwords", f.stopwords_path, "stopword list file (one word per line)");
}

void add_split_flags(CLI::App* c, Flags& f) {
    c->add_option("--train-fraction", f.train_fraction, "train split fraction (default 0.6)");
    c->add_option("--split-seed", f.split_seed, "shuffle seed for the split");
    c->add_flag("--stratified", f.stratified, "stratify the split by label");
}

void add_model_flags(CLI::App* c, Flags& f) {
    c->add_option("--num-layers", f.num_layers, "encoder layers (default 4)");
    c->add_option("--hidden-size", f.hidden_size, "hidden size (default 128)");
    c->add_option("--num-heads", f.num_heads, "attention heads (default 4)");
    c->add_option("--ff-size", f.ff_size, "feed-forward size (default 512)");
    c->add_option("--max-positions", f.max_positions, "position table size (default 128)");
    c->add_option("--dropout", f.dropout, "dropout rate (default 0.1)");
}

void add_train_flags(CLI::App* c, Flags& f) {
    c->add_option("--epochs", f.epochs, "training epochs (default 10)");
    c->add_option("--batch-size", f.batch_size, "minibatch size (default 16)");
    c->add_option("--learning-rate", f.learning_rate,
                  "learning rate (default 3e-5 fine-tune, 1e-4 pretrain)");
    c->add_option("--seed", f.seed, "training seed (init, shuffling, masking, dropout)");
    c->add_option("--max-len", f.max_len, "maximum sequence length (default 128)");
    c->add_option("--mask-ratio", f.mask_ratio, "MLM masking ratio (default 0.15)");
    c->add_option("--weight-decay", f.weight_decay, "decoupled weight decay (default 0.01)");
    c->add_option("--grad-clip", f.grad_clip, "global gradient-norm clip (default 1.0)");
}

// Flag > config file > default, per key.
RunConfig resolve(const CLI::App* c, const Flags& f) {
    RunConfig rc;
    if (c->get_option_no_throw("--config") != nullptr && c->count("--config") > 0) {
        rc = load_run_config(f.config_path);
    }
    auto given = [&](const std::string& name) {
        const CLI::Option* o = c->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--corpus")) rc.paths.corpus = f.corpus;
    if (given("--vocab")) rc.paths.vocab = f.vocab;
    if (given("--weights")) rc.paths.weights = f.weights;
    if (given("--init-weights")) rc.paths.init_weights = f.init_weights;
    if (given("--out-dir")) rc.paths.out_dir = f.out_dir;
    if (given("--train-fraction")) rc.split.train_fraction = f.train_fraction;
    if (given("--split-seed")) rc.split.seed = f.split_seed;
    if (given("--stratified")) rc.split.stratified = f.stratified;
    if (given("--steps")) {
        std::vector<std::string> names;
        std::string cur;
        for (const char ch : f.steps_csv) {
            if (ch == ',') {
                if (!cur.empty()) names.push_back(cur);
                cur.clear();
            } else if (ch != ' ') {
                cur += ch;
            }
        }
        if (!cur.empty()) names.push_back(cur);
        rc.pipe.steps = parse_step_names(names);
    }
    if (given("--stopwords")) rc.pipe.stopword_list = bd::load_stopwords(f.stopwords_path);
    if (given("--num-layers")) rc.model.num_layers = f.num_layers;
    if (given("--hidden-size")) rc.model.hidden_size = f.hidden_size;
    if (given("--num-heads")) rc.model.num_heads = f.num_heads;
    if (given("--ff-size")) rc.model.ff_size = f.ff_size;
    if (given("--max-positions")) rc.model.max_positions = f.max_positions;
    if (given("--dropout")) rc.model.dropout_rate = static_cast<float>(f.dropout);
    if (given("--epochs")) rc.train.epochs = f.epochs;
    if (given("--batch-size")) rc.train.batch_size = f.batch_size;
    if (given("--learning-rate")) {
        rc.train.learning_rate = static_cast<float>(f.learning_rate);
        rc.lr_explicit = true;
    }
    if (given("--seed")) rc.train.seed = f.seed;
    if (given("--max-len")) rc.train.max_len = f.max_len;
    if (given("--mask-ratio")) rc.train.mask_ratio = static_cast<float>(f.mask_ratio);
    if (given("--weight-decay")) rc.train.weight_decay = static_cast<float>(f.weight_decay);
    if (given("--grad-clip")) rc.train.grad_clip_norm = static_cast<float>(f.grad_clip);
    return rc;
}

// ---- shared helpers ----

std::string require(const std::string& value, const char* what) {
    if (value.empty()) throw bd::ConfigError(std::string("missing required ") + what);
    return value;
}

bd::Corpus load_corpus_checked(const RunConfig& rc) {
    return bd::load_corpus(require(rc.paths.corpus, "corpus path (--corpus)"));
}

std::vector<bd::CleanDocument> clean_corpus(const bd::Corpus& corpus,
                                            const bd::PipelineConfig& pipe) {
    std::vector<bd::CleanDocument> cleaned;
    cleaned.reserve(corpus.docs.size());
    for (const auto& doc : corpus.docs) cleaned.push_back(bd::run_pipeline(doc, pipe));
    return cleaned;
}

void resolve_vocab_size(bd::BertConfig& model, const bd::Vocab& vocab) {
    const auto v = static_cast<std::size_t>(vocab.size());
    if (model.vocab_size == 0) {
        model.vocab_size = v;
    } else if (model.vocab_size != v) {
        throw bd::ConfigError("config: model.vocab_size " + std::to_string(model.vocab_size) +
                              " does not match the vocabulary (" + std::to_string(v) + ")");
    }
}

std::string out_path(const RunConfig& rc, const std::string& name) {
    return rc.paths.out_dir + "/" + name;
}

json summary_block(const bd::ClassSummary& s) {
    return json{{"count", s.count},
                {"min", s.min},
                {"q1", s.q1},
                {"median", s.median},
                {"q3", s.q3},
                {"max", s.max},
                {"lower_fence", s.lower_fence},
                {"upper_fence", s.upper_fence},
                {"outlier_count", s.outlier_count}};
}

void write_json(const std::string& path, const json& j) {
    bd::io::write_file_atomic(path, j.dump(2) + "\n");
    std::printf("wrote %s\n", path.c_str());
}

void print_epoch(const bd::MetricsRecord& tr, const bd::MetricsRecord& te) {
    std::printf("epoch %zu: train_loss=%.6f train_acc=%.4f test_loss=%.6f test_acc=%.4f\n",
                tr.epoch, tr.loss, tr.accuracy, te.loss, te.accuracy);
}

// ---- commands ----

void cmd_stats(const RunConfig& rc) {
    const bd::Corpus corpus = load_corpus_checked(rc);
    const bd::CorpusStats st = bd::compute_stats(corpus);
    const json j = {{"count", {{"label0", st.count_label0}, {"label1", st.count_label1}}},
                    {"proportion",
                     {{"label0", st.proportion_label0}, {"label1", st.proportion_label1}}},
                    {"words", {{"label0", summary_block(st.label0)},
                               {"label1", summary_block(st.label1)}}}};
    write_json(out_path(rc, "stats.json"), j);

    std::string csv = "class,min,q1,median,q3,max,outlier_count\n";
    char buf[160];
    const bd::ClassSummary* rows[2] = {&st.label0, &st.label1};
    for (int cls = 0; cls < 2; ++cls) {
        std::snprintf(buf, sizeof buf, "%d,%g,%g,%g,%g,%g,%zu\n", cls, rows[cls]->min,
                      rows[cls]->q1, rows[cls]->median, rows[cls]->q3, rows[cls]->max,
                      rows[cls]->outlier_count);
        csv += buf;
    }
    const std::string path = out_path(rc, "boxplot.csv");
    bd::io::write_file_atomic(path, csv);
    std::printf("wrote %s\n", path.c_str());
}

void cmd_preprocess(const RunConfig& rc, const std::string& out_file) {
    rc.pipe.validate();
    const bd::Corpus corpus = load_corpus_checked(rc);
    std::string out = "id,tokens,label\n";
    for (const auto& doc : corpus.docs) {
        const bd::CleanDocument cd = bd::run_pipeline(doc, rc.pipe);
        std::string joined;
        for (std::size_t i = 0; i < cd.tokens.size(); ++i) {
            if (i > 0) joined += ' ';
            joined += cd.tokens[i];
        }
        out += bd::csv::join_record(
            {std::to_string(cd.id), joined, std::to_string(doc.label)});
    }
    const std::string path = out_file.empty() ? out_path(rc, "cleaned.csv") : out_file;
    bd::io::write_file_atomic(path, out);
    std::printf("wrote %s (%zu documents)\n", path.c_str(), corpus.docs.size());
}

void cmd_build_vocab(const RunConfig& rc, const std::string& out_file, std::size_t target,
                     std::size_t min_freq) {
    rc.pipe.validate();
    const bd::Corpus corpus = load_corpus_checked(rc);
    const bd::Vocab vocab = bd::build_vocab(clean_corpus(corpus, rc.pipe), target, min_freq);
    const std::string path = out_file.empty() ? out_path(rc, "vocab.txt") : out_file;
    bd::save_vocab(vocab, path);
    std::printf("wrote %s (%d tokens)\n", path.c_str(), vocab.size());
}

void cmd_split(const RunConfig& rc) {
    const bd::Corpus corpus = load_corpus_checked(rc);
    const auto parts = bd::split(corpus, rc.split);
    bd::save_corpus(parts.first, out_path(rc, "train.csv"));
    bd::save_corpus(parts.second, out_path(rc, "test.csv"));
    std::printf("wrote %s (%zu docs) and %s (%zu docs)\n", out_path(rc, "train.csv").c_str(),
                parts.first.docs.size(), out_path(rc, "test.csv").c_str(),
                parts.second.docs.size());
}

void cmd_pretrain(RunConfig rc) {
    if (!rc.lr_explicit) rc.train.learning_rate = 1e-4f;
    rc.pipe.validate();
    const bd::Corpus corpus = load_corpus_checked(rc);
    const bd::Vocab vocab = bd::load_vocab(require(rc.paths.vocab, "vocabulary (--vocab)"));
    resolve_vocab_size(rc.model, vocab);
    rc.model.validate();
    rc.train.validate();

    bd::ModelWeights w = bd::init_model(rc.model, rc.train.seed);
    const auto records =
        bd::pretrain(corpus, rc.pipe, vocab, w, rc.train, [](const bd::MetricsRecord& r) {
            std::printf("epoch %zu: train_loss=%.6f train_acc=%.4f\n", r.epoch, r.loss,
                        r.accuracy);
        });

    const std::string weights_path =
        rc.paths.weights.empty() ? out_path(rc, "pretrained.btwa") : rc.paths.weights;
    bd::save_weights(w, weights_path);
    std::printf("wrote %s\n", weights_path.c_str());
    bd::write_metrics_csv(out_path(rc, "pretrain_metrics.csv"), records);
    std::printf("wrote %s\n", out_path(rc, "pretrain_metrics.csv").c_str());
    write_json(out_path(rc, "pretrain_summary.json"), bd::summary_to_json(bd::summarize(records)));
}

void cmd_finetune(const RunConfig& rc) {
    rc.pipe.validate();
    const bd::Corpus corpus = load_corpus_checked(rc);
    const auto parts = bd::split(corpus, rc.split);
    const bd::Vocab vocab = bd::load_vocab(require(rc.paths.vocab, "vocabulary (--vocab)"));

    bd::ModelWeights w;
    if (!rc.paths.init_weights.empty()) {
        w = bd::load_weights(rc.paths.init_weights);
        if (w.config.vocab_size != static_cast<std::size_t>(vocab.size())) {
            throw bd::ConfigError("initial weights were trained with a different vocabulary");
        }
    } else {
        bd::BertConfig model = rc.model;
        resolve_vocab_size(model, vocab);
        model.validate();
        w = bd::init_model(model, rc.train.seed);
    }
    rc.train.validate();

    const auto records =
        bd::finetune(parts.first, parts.second, rc.pipe, vocab, w, rc.train, print_epoch);

    const std::string weights_path =
        rc.paths.weights.empty() ? out_path(rc, "model.btwa") : rc.paths.weights;
    bd::save_weights(w, weights_path);
    std::printf("wrote %s\n", weights_path.c_str());
    bd::write_metrics_csv(out_path(rc, "finetune_metrics.csv"), records);
    std::printf("wrote %s\n", out_path(rc, "finetune_metrics.csv").c_str());
    write_json(out_path(rc, "finetune_summary.json"), bd::summary_to_json(bd::summarize(records)));
}

void cmd_evaluate(RunConfig rc) {
    rc.pipe.validate();
    const bd::ModelWeights w =
        bd::load_weights(require(rc.paths.weights, "weight archive (--weights)"));
    const bd::Vocab vocab = bd::load_vocab(require(rc.paths.vocab, "vocabulary (--vocab)"));
    if (w.config.vocab_size != static_cast<std::size_t>(vocab.size())) {
        throw bd::ConfigError("weights were trained with a different vocabulary");
    }
    const bd::Corpus corpus = load_corpus_checked(rc);
    rc.train.max_len = std::min(rc.train.max_len, w.config.max_positions);

    const bd::MetricsRecord rec = bd::evaluate(w, corpus, rc.pipe, vocab, rc.train);
    std::printf("split  loss      accuracy\n");
    std::printf("test   %.6f  %.4f\n", rec.loss, rec.accuracy);
    write_json(out_path(rc, "eval_summary.json"), bd::summary_to_json(bd::summarize({rec})));
}

void cmd_predict(RunConfig rc, const std::string& text, const std::string& file) {
    rc.pipe.validate();
    const bd::ModelWeights w =
        bd::load_weights(require(rc.paths.weights, "weight archive (--weights)"));
    const bd::Vocab vocab = bd::load_vocab(require(rc.paths.vocab, "vocabulary (--vocab)"));
    if (w.config.vocab_size != static_cast<std::size_t>(vocab.size())) {
        throw bd::ConfigError("weights were trained with a different vocabulary");
    }
    const std::size_t max_len = std::min(rc.train.max_len, w.config.max_positions);

    std::vector<std::string> inputs;
    if (!file.empty()) {
        const std::string content = bd::io::read_file(file);
        std::string line;
        for (const char c : content) {
            if (c == '\n') {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                inputs.push_back(line);
                line.clear();
            } else {
                line += c;
            }
        }
        if (!line.empty()) inputs.push_back(line);
    } else {
        inputs.push_back(text);
    }
    if (inputs.empty()) throw bd::NumericError("predict: empty input text");

    bd::Rng unused(0);
    for (const auto& input : inputs) {
        if (input.find_first_not_of(" \t\r\n") == std::string::npos) {
            throw bd::NumericError("predict: empty input text");
        }
        const auto tokens = bd::run_pipeline({0, input, 0}, rc.pipe).tokens;
        const bd::Encoding enc = bd::encode(tokens, nullptr, vocab, max_len);
        bd::Graph g;
        g.set_recording(false);
        const bd::TensorPtr hidden = bd::forward_encoder(g, w, enc, /*train=*/false, unused);
        const bd::TensorPtr logits = bd::classify(g, bd::pool(g, hidden, w), w);
        const double l0 = logits->data[0], l1 = logits->data[1];
        const double mx = std::max(l0, l1);
        const double e0 = std::exp(l0 - mx), e1 = std::exp(l1 - mx);
        const double p1 = e1 / (e0 + e1);
        std::printf("label=%d p0=%.6f p1=%.6f\n", p1 > 0.5 ? 1 : 0, 1.0 - p1, p1);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AI-generated-text detection toolkit"};
    app.require_subcommand(1);
    Flags f;

    CLI::App* stats = app.add_subcommand("stats", "corpus statistics and box-plot data");
    add_config_flag(stats, f);
    add_io_flags(stats, f);

    CLI::App* preprocess = app.add_subcommand("preprocess", "clean a corpus to token lists");
    add_config_flag(preprocess, f);
    add_io_flags(preprocess, f);
    add_pipeline_flags(preprocess, f);
    preprocess->add_option("--out", f.out, "output CSV path (default <out-dir>/cleaned.csv)");

    CLI::App* build_vocab = app.add_subcommand("build-vocab", "build a WordPiece vocabulary");
    add_config_flag(build_vocab, f);
    add_io_flags(build_vocab, f);
    add_pipeline_flags(build_vocab, f);
    build_vocab->add_option("--out", f.out, "output vocab path (default <out-dir>/vocab.txt)");
    build_vocab->add_option("--target-size", f.target_size, "vocabulary budget (default 1000)");
    build_vocab->add_option("--min-frequency", f.min_frequency,
                            "minimum word frequency (default 1)");

    CLI::App* split_cmd = app.add_subcommand("split", "write train/test CSV splits");
    add_config_flag(split_cmd, f);
    add_io_flags(split_cmd, f);
    add_split_flags(split_cmd, f);

    CLI::App* pretrain = app.add_subcommand("pretrain", "MLM/NSP pretraining from scratch");
    add_config_flag(pretrain, f);
    add_io_flags(pretrain, f, /*vocab=*/true, /*weights=*/true);
    add_pipeline_flags(pretrain, f);
    add_model_flags(pretrain, f);
    add_train_flags(pretrain, f);

    CLI::App* finetune = app.add_subcommand("finetune", "split and fine-tune a classifier");
    add_config_flag(finetune, f);
    add_io_flags(finetune, f, /*vocab=*/true, /*weights=*/true);
    finetune->add_option("--init-weights", f.init_weights,
                         "pretrained archive to start from (default: random init)");
    add_pipeline_flags(finetune, f);
    add_split_flags(finetune, f);
    add_model_flags(finetune, f);
    add_train_flags(finetune, f);

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a trained model on a corpus");
    add_config_flag(evaluate, f);
    add_io_flags(evaluate, f, /*vocab=*/true, /*weights=*/true);
    add_pipeline_flags(evaluate, f);
    evaluate->add_option("--max-len", f.max_len, "maximum sequence length (default 128)");

    CLI::App* predict = app.add_subcommand("predict", "classify text as human or generated");
    add_config_flag(predict, f);
    predict->add_option("--vocab", f.vocab, "vocabulary file");
    predict->add_option("--weights", f.weights, "weight archive path");
    CLI::Option* text_opt = predict->add_option("--text", f.text, "text to classify");
    CLI::Option* file_opt =
        predict->add_option("--file", f.file, "file with one input text per line");
    text_opt->excludes(file_opt);
    add_pipeline_flags(predict, f);
    predict->add_option("--max-len", f.max_len, "maximum sequence length (default 128)");

    try {
        app.parse(argc, argv);
        if (stats->parsed()) {
            cmd_stats(resolve(stats, f));
        } else if (preprocess->parsed()) {
            cmd_preprocess(resolve(preprocess, f), f.out);
        } else if (build_vocab->parsed()) {
            cmd_build_vocab(resolve(build_vocab, f), f.out, f.target_size, f.min_frequency);
        } else if (split_cmd->parsed()) {
            cmd_split(resolve(split_cmd, f));
        } else if (pretrain->parsed()) {
            cmd_pretrain(resolve(pretrain, f));
        } else if (finetune->parsed()) {
            cmd_finetune(resolve(finetune, f));
        } else if (evaluate->parsed()) {
            cmd_evaluate(resolve(evaluate, f));
        } else if (predict->parsed()) {
            if (predict->count("--text") == 0 && predict->count("--file") == 0) {
                throw bd::ConfigError("predict: --text or --file is required");
            }
            cmd_predict(resolve(predict, f), f.text, f.file);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const bd::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const bd::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
