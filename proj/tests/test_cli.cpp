#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

#ifndef BBRAILLE_BIN
#define BBRAILLE_BIN "bbraille"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI binary through the shell with stdin/stdout/stderr captured.
RunResult run(const std::string& args, const std::string& stdin_text = "") {
  std::string in_path = testutil::temp_path("stdin");
  std::string out_path = testutil::temp_path("stdout");
  std::string err_path = testutil::temp_path("stderr");
  testutil::write_file(in_path, stdin_text);
  std::string command = std::string(BBRAILLE_BIN) + " " + args + " < " +
                        in_path + " > " + out_path + " 2> " + err_path;
  int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = testutil::read_file(out_path);
  result.err = testutil::read_file(err_path);
  std::remove(in_path.c_str());
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

std::string table(const std::string& name) {
  return testutil::data_path("tables/" + name + ".tsv");
}

}  // namespace

TEST_CASE("translate renders unicode braille by default") {
  RunResult r = run("translate --table " + table("devanagari"), "कमल\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "⠅⠍⠇\n");
}

TEST_CASE("translate renders dot notation on request") {
  RunResult r = run("translate --table " + table("devanagari") +
                        " --format dots",
                    "क\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "13\n");
}

TEST_CASE("translate renders brf on request") {
  RunResult r = run("translate --table " + table("devanagari") +
                        " --format brf",
                    "कमल\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "KML\n");
}

TEST_CASE("empty input gives empty output and success") {
  RunResult r = run("translate --table " + table("devanagari"), "");
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
}

TEST_CASE("blank lines survive translation") {
  RunResult r = run("translate --table " + table("devanagari"),
                    "कमल\n\nकमल\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "⠅⠍⠇\n\n⠅⠍⠇\n");
}

TEST_CASE("exit code 2 for unreadable tables") {
  RunResult r = run("translate --table /nonexistent/table.tsv", "क\n");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("exit code 3 when no script is detected") {
  RunResult r = run("translate --table " + table("devanagari"), "123 !?\n");
  CHECK(r.exit_code == 3);
}

TEST_CASE("explicit script skips detection") {
  RunResult r = run("translate --table " + table("common") +
                        " --script devanagari --format dots",
                    "12\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "3456-1-12\n");
}

TEST_CASE("exit code 4 when a site is hit without a model") {
  RunResult r = run("translate --table " + table("devanagari"), "कं\n");
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("model") != std::string::npos);
}

TEST_CASE("untranslated tokens go to the diagnostic stream") {
  RunResult r = run("translate --table " + table("devanagari"), "कx\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "⠅\n");
  CHECK(r.err.find("untranslated") != std::string::npos);
  CHECK(r.err.find("\"x\"") != std::string::npos);
}

TEST_CASE("train then translate resolves ambiguous sites") {
  std::string gold = testutil::temp_path("gold") + ".tsv";
  std::string tagged = testutil::temp_path("tagged") + ".tsv";
  std::string model = testutil::temp_path("model") + ".bbt";
  std::string tables =
      " --table " + table("devanagari") + " --table " + table("common");
  RunResult gen = run("gen-corpus" + tables +
                      " --script devanagari -n 50 --inject 0.12 --seed 5 "
                      "--gold-out " +
                      gold + " --tagged-out " + tagged);
  REQUIRE(gen.exit_code == 0);
  RunResult train = run("train" + tables + " --corpus " + tagged +
                        " --model-out " + model +
                        " --epochs 10 --embed-dim 16 --hidden-dim 24 "
                        "--seed 3");
  REQUIRE(train.exit_code == 0);
  RunResult hybrid =
      run("translate" + tables + " --model " + model, "कमलं कं\n");
  CHECK(hybrid.exit_code == 0);
  CHECK(!hybrid.out.empty());
  std::remove(gold.c_str());
  std::remove(tagged.c_str());
  std::remove(model.c_str());
}

TEST_CASE("training is deterministic across runs") {
  std::string gold = testutil::temp_path("gold") + ".tsv";
  std::string tagged = testutil::temp_path("tagged") + ".tsv";
  std::string tables =
      " --table " + table("devanagari") + " --table " + table("common");
  RunResult gen = run("gen-corpus" + tables +
                      " --script devanagari -n 25 --inject 0.15 --seed 6 "
                      "--gold-out " +
                      gold + " --tagged-out " + tagged);
  REQUIRE(gen.exit_code == 0);
  std::string model_a = testutil::temp_path("model_a") + ".bbt";
  std::string model_b = testutil::temp_path("model_b") + ".bbt";
  std::string loss_a = testutil::temp_path("loss_a") + ".tsv";
  std::string loss_b = testutil::temp_path("loss_b") + ".tsv";
  std::string args = "train" + tables + " --corpus " + tagged +
                     " --epochs 6 --embed-dim 12 --hidden-dim 16 --seed 11";
  RunResult a =
      run(args + " --model-out " + model_a + " --loss-out " + loss_a);
  RunResult b =
      run(args + " --model-out " + model_b + " --loss-out " + loss_b);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(testutil::read_file(model_a) == testutil::read_file(model_b));
  CHECK(testutil::read_file(loss_a) == testutil::read_file(loss_b));
  CHECK(!testutil::read_file(model_a).empty());
  for (const std::string& p : {gold, tagged, model_a, model_b, loss_a, loss_b})
    std::remove(p.c_str());
}

TEST_CASE("train reports unknown tags with their line") {
  std::string corpus = testutil::temp_path("badcorpus") + ".tsv";
  testutil::write_file(corpus,
                       "DEVANAGARI\tक ं\tO SIGN\n"
                       "DEVANAGARI\tक ं\tO BOGUS\n");
  std::string model = testutil::temp_path("model") + ".bbt";
  RunResult r = run("train --table " + table("devanagari") + " --corpus " +
                    corpus + " --model-out " + model);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(testutil::read_file(model).empty());  // nothing written
  std::remove(corpus.c_str());
}

TEST_CASE("evaluate prints the report table") {
  std::string gold = testutil::temp_path("gold") + ".tsv";
  std::string tables =
      " --table " + table("devanagari") + " --table " + table("common");
  RunResult gen = run("gen-corpus" + tables +
                      " --script devanagari -n 10 --inject 0 --seed 2 "
                      "--gold-out " +
                      gold);
  REQUIRE(gen.exit_code == 0);
  std::string tsv = testutil::temp_path("report") + ".tsv";
  RunResult r = run("evaluate" + tables + " --gold " + gold + " --tsv " + tsv);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Script") != std::string::npos);
  CHECK(r.out.find("Rule Based") != std::string::npos);
  CHECK(r.out.find("LSTM") != std::string::npos);
  CHECK(r.out.find("Total") != std::string::npos);
  CHECK(r.out.find("1.0000") != std::string::npos);
  std::string tsv_text = testutil::read_file(tsv);
  CHECK(tsv_text.find("Devanagari\t1.0000\t1.0000\t") != std::string::npos);
  RunResult missing = run("evaluate" + tables + " --gold /nonexistent.tsv");
  CHECK(missing.exit_code == 2);
  std::remove(gold.c_str());
  std::remove(tsv.c_str());
}

TEST_CASE("inspect-table lints cleanly on bundled tables") {
  RunResult r = run("inspect-table --table " + table("devanagari"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("ambiguity class") != std::string::npos);
}

TEST_CASE("inspect-table flags duplicate untagged rows") {
  std::string bad = testutil::temp_path("badtable") + ".tsv";
  testutil::write_file(bad,
                       "DEVANAGARI\tक\t13\n"
                       "DEVANAGARI\tक\t46\n");
  RunResult r = run("inspect-table --table " + bad);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find(":2:") != std::string::npos);
  std::remove(bad.c_str());
}

TEST_CASE("inspect-table warns on empty tables but exits clean") {
  std::string empty = testutil::temp_path("empty") + ".tsv";
  testutil::write_file(empty, "# nothing here\n");
  RunResult r = run("inspect-table --table " + empty);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("no rules") != std::string::npos);
  std::remove(empty.c_str());
}

TEST_CASE("failed output writes leave no partial file") {
  RunResult r = run("translate --table " + table("devanagari") +
                        " --output /nonexistent-dir/out.txt",
                    "क\n");
  CHECK(r.exit_code == 2);
  std::ifstream check("/nonexistent-dir/out.txt");
  CHECK(!check.good());
}

TEST_CASE("gen-corpus warns when the table has nothing to inject") {
  std::string plain = testutil::temp_path("plain") + ".tsv";
  testutil::write_file(plain,
                       "DEVANAGARI\tक\t13\nDEVANAGARI\tम\t134\n"
                       "DEVANAGARI\tल\t123\n");
  std::string gold = testutil::temp_path("gold") + ".tsv";
  RunResult r = run("gen-corpus --table " + plain +
                    " --script devanagari -n 3 --inject 0.5 --gold-out " +
                    gold);
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("no ambiguity classes") != std::string::npos);
  std::remove(plain.c_str());
  std::remove(gold.c_str());
}
