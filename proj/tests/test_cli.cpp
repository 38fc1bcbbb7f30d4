#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include <bertdetect/corpus.hpp>
#include <bertdetect/io.hpp>
#include <bertdetect/tokenizer.hpp>

#include "support.hpp"

#ifndef BD_CLI_PATH
#error "BD_CLI_PATH must point at the bertdetect binary"
#endif

using nlohmann::json;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Run the CLI through the shell, capturing exit code and both streams.
CmdResult run_cli(const std::string& args, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string out_f = dir + "/cmd_stdout.txt";
    const std::string err_f = dir + "/cmd_stderr.txt";
    const std::string cmd =
        std::string(BD_CLI_PATH) + " " + args + " > " + out_f + " 2> " + err_f;
    const int status = std::system(cmd.c_str());
    CmdResult r;
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    r.out = bertdetect::io::read_file(out_f);
    r.err = bertdetect::io::read_file(err_f);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli help and usage errors") {
    const std::string dir = testsup::temp_dir("cli") + "/help";
    const CmdResult help = run_cli("--help", dir);
    REQUIRE(help.exit_code == 0);
    REQUIRE(contains(help.out, "stats"));
    REQUIRE(contains(help.out, "finetune"));
    REQUIRE(contains(help.out, "predict"));

    REQUIRE(run_cli("", dir).exit_code == 1);
    const CmdResult missing = run_cli("stats --corpus /nonexistent.csv", dir);
    REQUIRE(missing.exit_code == 1);
    REQUIRE(contains(missing.err, "error:"));
}

TEST_CASE("cli rejects unknown config keys") {
    const std::string dir = testsup::temp_dir("cli") + "/config";
    std::filesystem::create_directories(dir);
    bertdetect::io::write_file_atomic(dir + "/bad.json", "{\"trian\": {}}\n");
    const CmdResult r = run_cli("finetune --config " + dir + "/bad.json", dir);
    REQUIRE(r.exit_code == 1);
    REQUIRE(contains(r.err, "unknown key"));
}

TEST_CASE("cli stats writes the summary json and boxplot csv") {
    const std::string dir = testsup::temp_dir("cli") + "/stats";
    const CmdResult r = run_cli(
        "stats --corpus " + testsup::data_path("smoke_corpus.csv") + " --out-dir " + dir, dir);
    REQUIRE(r.exit_code == 0);

    const json j = json::parse(bertdetect::io::read_file(dir + "/stats.json"));
    const auto corpus = bertdetect::load_corpus(testsup::data_path("smoke_corpus.csv"));
    const auto stats = bertdetect::compute_stats(corpus);
    REQUIRE(j.at("count").at("label0").get<std::size_t>() == stats.count_label0);
    REQUIRE(j.at("count").at("label1").get<std::size_t>() == stats.count_label1);
    REQUIRE(j.at("proportion").at("label0").get<double>() == stats.proportion_label0);
    REQUIRE(j.at("words").at("label0").at("median").get<double>() == stats.label0.median);
    REQUIRE(j.at("words").at("label1").at("q3").get<double>() == stats.label1.q3);

    const std::string boxplot = bertdetect::io::read_file(dir + "/boxplot.csv");
    REQUIRE(boxplot.rfind("class,min,q1,median,q3,max,outlier_count\n", 0) == 0);
    REQUIRE(std::count(boxplot.begin(), boxplot.end(), '\n') == 3);
    REQUIRE(contains(boxplot, "\n0,"));
    REQUIRE(contains(boxplot, "\n1,"));
}

TEST_CASE("cli split reproduces the library split sizes") {
    const std::string dir = testsup::temp_dir("cli") + "/split";
    const CmdResult r =
        run_cli("split --corpus " + testsup::data_path("gap_corpus.csv") + " --out-dir " + dir +
                    " --train-fraction 0.6 --split-seed 7",
                dir);
    REQUIRE(r.exit_code == 0);
    REQUIRE(contains(r.out, "(240 docs)"));
    REQUIRE(contains(r.out, "(160 docs)"));

    const auto train = bertdetect::load_corpus(dir + "/train.csv");
    const auto test = bertdetect::load_corpus(dir + "/test.csv");
    REQUIRE(train.size() == 240);
    REQUIRE(test.size() == 160);
}

TEST_CASE("cli end to end: vocab, finetune, evaluate, predict") {
    const std::string dir = testsup::temp_dir("cli") + "/e2e";
    const std::string smoke = testsup::data_path("smoke_corpus.csv");

    // Vocabulary over the cleaned smoke corpus.
    const CmdResult bv = run_cli(
        "build-vocab --corpus " + smoke + " --out-dir " + dir + " --target-size 160", dir);
    REQUIRE(bv.exit_code == 0);
    REQUIRE(contains(bv.out, "vocab.txt (69 tokens)"));
    const bertdetect::Vocab vocab = bertdetect::load_vocab(dir + "/vocab.txt");
    REQUIRE(vocab.size() == 69);

    // Two identical fine-tuning runs.
    const std::string train_flags =
        "finetune --corpus " + smoke + " --vocab " + dir + "/vocab.txt" +
        " --num-layers 2 --hidden-size 32 --num-heads 2 --ff-size 64 --max-positions 32"
        " --max-len 32 --epochs 2 --batch-size 8 --learning-rate 1e-3 --seed 7"
        " --train-fraction 0.75 --split-seed 7 --out-dir ";
    const CmdResult t1 = run_cli(train_flags + dir + "/run1", dir);
    REQUIRE(t1.exit_code == 0);
    REQUIRE(contains(t1.out,
                     "epoch 1: train_loss=0.696907 train_acc=0.4167 "
                     "test_loss=0.689127 test_acc=0.6250"));
    const CmdResult t2 = run_cli(train_flags + dir + "/run2", dir);
    REQUIRE(t2.exit_code == 0);

    REQUIRE(bertdetect::io::read_file(dir + "/run1/model.btwa") ==
            bertdetect::io::read_file(dir + "/run2/model.btwa"));
    REQUIRE(bertdetect::io::read_file(dir + "/run1/finetune_metrics.csv") ==
            bertdetect::io::read_file(dir + "/run2/finetune_metrics.csv"));

    const std::string metrics = bertdetect::io::read_file(dir + "/run1/finetune_metrics.csv");
    REQUIRE(metrics.rfind("epoch,split,loss,accuracy\n", 0) == 0);
    REQUIRE(std::count(metrics.begin(), metrics.end(), '\n') == 5);  // header + 2 epochs x 2

    const json summary =
        json::parse(bertdetect::io::read_file(dir + "/run1/finetune_summary.json"));
    REQUIRE(summary.contains("train"));
    REQUIRE(summary.contains("test"));
    REQUIRE(summary.contains("accuracy_gap"));

    // Evaluate the trained weights on the same corpus.
    const CmdResult ev = run_cli("evaluate --corpus " + smoke + " --vocab " + dir +
                                     "/vocab.txt --weights " + dir +
                                     "/run1/model.btwa --max-len 32 --out-dir " + dir,
                                 dir);
    REQUIRE(ev.exit_code == 0);
    REQUIRE(contains(ev.out, "split  loss      accuracy\ntest   "));
    const json eval_summary = json::parse(bertdetect::io::read_file(dir + "/eval_summary.json"));
    REQUIRE(eval_summary.contains("test"));
    REQUIRE_FALSE(eval_summary.contains("train"));
    REQUIRE_FALSE(eval_summary.contains("accuracy_gap"));

    // Single-text prediction emits one well-formed line.
    const CmdResult p1 = run_cli("predict --vocab " + dir + "/vocab.txt --weights " + dir +
                                     "/run1/model.btwa --text \"mountain river forest stone\"",
                                 dir);
    REQUIRE(p1.exit_code == 0);
    int label = -1;
    double p0 = -1.0, pr1 = -1.0;
    REQUIRE(std::sscanf(p1.out.c_str(), "label=%d p0=%lf p1=%lf", &label, &p0, &pr1) == 3);
    REQUIRE((label == 0 || label == 1));
    REQUIRE(p0 >= 0.0);
    REQUIRE(pr1 >= 0.0);
    REQUIRE(std::fabs(p0 + pr1 - 1.0) < 1e-4);
    REQUIRE(label == (pr1 > 0.5 ? 1 : 0));

    // File mode scores one line per input line.
    bertdetect::io::write_file_atomic(dir + "/batch.txt",
                                      "mountain river forest stone\ncity lights hum at night\n");
    const CmdResult pf = run_cli("predict --vocab " + dir + "/vocab.txt --weights " + dir +
                                     "/run1/model.btwa --file " + dir + "/batch.txt",
                                 dir);
    REQUIRE(pf.exit_code == 0);
    REQUIRE(std::count(pf.out.begin(), pf.out.end(), '\n') == 2);
    REQUIRE(pf.out.rfind("label=", 0) == 0);

    // Blank input is a numeric-domain error: exit code 2.
    const CmdResult blank = run_cli("predict --vocab " + dir + "/vocab.txt --weights " + dir +
                                        "/run1/model.btwa --text \"   \"",
                                    dir);
    REQUIRE(blank.exit_code == 2);
    REQUIRE(contains(blank.err, "error:"));
}
