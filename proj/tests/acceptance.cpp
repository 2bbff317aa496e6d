// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "bharti/cli.hpp"
#include "bharti/eval.hpp"
#include "bharti/translate.hpp"
#include "test_util.hpp"

using namespace bharti;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail,
            double seconds) {
  std::printf("%s  %-28s %s (%.2fs)\n", ok ? "PASS" : "FAIL", name.c_str(),
              detail.c_str(), seconds);
  if (!ok) ++failures;
}

void criterion(const std::string& name, double time_budget_s,
               const std::function<std::pair<bool, std::string>()>& body) {
  auto start = Clock::now();
  bool ok = false;
  std::string detail;
  try {
    auto [good, text] = body();
    ok = good;
    detail = text;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (time_budget_s > 0 && seconds > time_budget_s) {
    ok = false;
    detail += " [over time budget " + std::to_string(time_budget_s) + "s]";
  }
  report(name, ok, detail, seconds);
}

RuleTable script_table(Script script) {
  std::string name(script_name(script));
  for (char& c : name) c = static_cast<char>(std::tolower(c));
  if (script == Script::PersoArabic) name = "urdu";
  return RuleTable::load_files({testutil::data_path("tables/" + name + ".tsv"),
                                testutil::data_path("tables/common.tsv")});
}

const char* kScriptFileNames[] = {"devanagari", "bengali", "gujarati",
                                  "kannada",    "malayalam", "odia",
                                  "gurmukhi",   "tamil",     "telugu",
                                  "urdu"};

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");

  // Every generated pair across all ten scripts reproduces its gold output
  // byte for byte when nothing is ambiguous.
  criterion("oracle-equivalence", 10.0, []() -> std::pair<bool, std::string> {
    std::size_t pairs_checked = 0;
    for (Script script : all_scripts()) {
      RuleTable table = script_table(script);
      GeneratorOptions options;
      options.pair_count = 100;
      options.inject_rate = 0.0;
      options.seed = 20240601;
      GeneratedCorpus corpus = generate_corpus(table, script, options);
      for (const GoldPair& pair : corpus.pairs) {
        TranslationResult result =
            translate_hybrid(pair.source, table, nullptr, pair.script,
                             Resolution::FirstCandidate);
        if (result.cells != pair.gold)
          return {false, "mismatch in " + std::string(script_name(script)) +
                             ": " + pair.source};
        ++pairs_checked;
      }
    }
    return {true, std::to_string(pairs_checked) + " pairs byte-exact"};
  });

  // Training on the synthetic Devanagari corpus lifts accuracy to >= 0.99
  // while the rule-only pass stays below 1.
  TaggerModel hybrid_model;  // reused by the determinism criterion
  GeneratedCorpus hybrid_corpus;
  criterion("hybrid-accuracy", 120.0, [&]() -> std::pair<bool, std::string> {
    RuleTable table = script_table(Script::Devanagari);
    GeneratorOptions options;
    options.pair_count = 500;
    options.inject_rate = 0.10;
    options.seed = 42;
    hybrid_corpus = generate_corpus(table, Script::Devanagari, options);
    TrainOptions train_options;  // defaults
    train_options.seed = 5;
    hybrid_model = train_on_corpus(hybrid_corpus.tagged,
                                   table.ambiguity_tags(), train_options,
                                   nullptr);
    EvalReport report = evaluate(hybrid_corpus.pairs, table, &hybrid_model);
    const ScriptResult& row = report.rows.at(0);
    SiteAccuracy sites =
        site_accuracy(hybrid_corpus.tagged, table, hybrid_model);
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "rule %.4f, hybrid %.4f, sites %zu/%zu",
                  row.rule_accuracy(), row.hybrid_accuracy(), sites.correct,
                  sites.total);
    bool ok = row.rule_accuracy() < 1.0 && row.hybrid_accuracy() >= 0.99 &&
              row.hybrid_accuracy() >= row.rule_accuracy();
    return {ok, detail};
  });

  // At 6% injection the rule-only pass alone should land mid-nineties:
  // ambiguity is the dominant error source and the model is out of the loop.
  criterion("rule-accuracy-band", 30.0, []() -> std::pair<bool, std::string> {
    RuleTable table = script_table(Script::Devanagari);
    GeneratorOptions options;
    options.pair_count = 500;
    options.inject_rate = 0.06;
    options.seed = 99;
    GeneratedCorpus corpus =
        generate_corpus(table, Script::Devanagari, options);
    EvalReport report = evaluate(corpus.pairs, table, nullptr);
    double acc = report.rows.at(0).rule_accuracy();
    char detail[80];
    std::snprintf(detail, sizeof(detail), "rule-only %.4f in [0.92, 0.96]",
                  acc);
    return {acc >= 0.92 && acc <= 0.96, detail};
  });

  // Analytic BPTT gradients vs central finite differences on 20 random
  // small instances.
  criterion("gradient-correctness", 30.0, []() -> std::pair<bool, std::string> {
    double worst = 0.0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      std::vector<std::string> tokens = {"a", "b", "c", "d", "e"};
      std::vector<std::string> labels = {"X", "Y"};
      Vocab vocab = Vocab::build(tokens, labels);  // |V|=7, |tags|=3
      TrainOptions options;
      options.embed_dim = 3;
      options.hidden_dim = 4;
      options.dropout = 0.0;
      options.seed = seed;
      TaggerModel model = init_model(vocab, options);
      std::mt19937_64 rng(seed * 7919);
      auto scatter_m = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = testutil::uniform(rng, -0.6, 0.6);
      };
      auto scatter_v = [&](Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
          v(i) = testutil::uniform(rng, -0.6, 0.6);
      };
      scatter_m(model.embedding);
      for (auto* side : {&model.fwd, &model.bwd})
        for (auto& layer : *side) {
          scatter_m(layer.W);
          scatter_m(layer.U);
          scatter_v(layer.b);
        }
      scatter_m(model.head_w);
      scatter_v(model.head_b);

      TrainExample ex;
      for (int t = 0; t < 5; ++t) {
        ex.token_ids.push_back(1 + static_cast<int>(rng() % 6));
        ex.tag_ids.push_back(static_cast<int>(rng() % 3));
      }
      auto [loss, grads] = backprop(model, ex, false, 0);
      (void)loss;
      const double eps = 1e-5;
      auto probe = [&](double& slot, double analytic) {
        double saved = slot;
        slot = saved + eps;
        double up = example_loss(model, ex, false, 0);
        slot = saved - eps;
        double down = example_loss(model, ex, false, 0);
        slot = saved;
        double numeric = (up - down) / (2 * eps);
        // Below ~1e-6 the 1e-5-step central difference bottoms out at its
        // roundoff floor (~1e-10 absolute), so the comparison is absolute
        // there and relative everywhere else.
        double err = std::abs(numeric - analytic) /
                     std::max({std::abs(numeric), std::abs(analytic), 1e-6});
        worst = std::max(worst, err);
      };
      auto fd_m = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& grad) {
        for (Eigen::Index r = 0; r < param.rows(); ++r)
          for (Eigen::Index c = 0; c < param.cols(); ++c)
            probe(param(r, c), grad(r, c));
      };
      auto fd_v = [&](Eigen::VectorXd& param, const Eigen::VectorXd& grad) {
        for (Eigen::Index i = 0; i < param.size(); ++i)
          probe(param(i), grad(i));
      };
      fd_m(model.embedding, grads.embedding);
      for (int l = 0; l < model.layers; ++l) {
        fd_m(model.fwd[l].W, grads.fwd[l].W);
        fd_m(model.fwd[l].U, grads.fwd[l].U);
        fd_v(model.fwd[l].b, grads.fwd[l].b);
        fd_m(model.bwd[l].W, grads.bwd[l].W);
        fd_m(model.bwd[l].U, grads.bwd[l].U);
        fd_v(model.bwd[l].b, grads.bwd[l].b);
      }
      fd_m(model.head_w, grads.head_w);
      fd_v(model.head_b, grads.head_b);
      if (worst >= 1e-4) break;
    }
    char detail[80];
    std::snprintf(detail, sizeof(detail), "max relative error %.2e", worst);
    return {worst < 1e-4, detail};
  });

  // Zero-parameter hidden states and reversal symmetry.
  criterion("lstm-algebraic", 20.0, []() -> std::pair<bool, std::string> {
    Vocab vocab = Vocab::build({"a", "b", "c"}, {"X"});
    TrainOptions zero_options;
    zero_options.embed_dim = 3;
    zero_options.hidden_dim = 4;
    zero_options.seed = 1;
    TaggerModel zero = init_model(vocab, zero_options);
    zero.embedding.setZero();
    for (auto* side : {&zero.fwd, &zero.bwd})
      for (auto& layer : *side) {
        layer.W.setZero();
        layer.U.setZero();
        layer.b.setZero();
      }
    zero.head_w.setOnes();  // any hidden activity would reach the scores
    zero.head_b.setZero();
    Eigen::MatrixXd scores =
        bilstm_forward(std::vector<int>{2, 3, 4, 2}, zero);
    if (scores.cwiseAbs().maxCoeff() != 0.0)
      return {false, "zero model produced nonzero hidden state"};

    std::mt19937_64 rng(4242);
    double worst = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
      TrainOptions options;
      options.embed_dim = 3;
      options.hidden_dim = 4;
      options.seed = 100 + iter;
      TaggerModel model = init_model(vocab, options);
      auto scatter = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = testutil::uniform(rng, -0.8, 0.8);
      };
      auto scatter_v = [&](Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
          v(i) = testutil::uniform(rng, -0.8, 0.8);
      };
      scatter(model.embedding);
      for (auto* side : {&model.fwd, &model.bwd})
        for (auto& layer : *side) {
          scatter(layer.W);
          scatter(layer.U);
          scatter_v(layer.b);
        }
      scatter(model.head_w);
      const int H = model.hidden_dim;
      int T = 1 + static_cast<int>(rng() % 6);
      std::vector<int> ids, rev;
      for (int t = 0; t < T; ++t)
        ids.push_back(2 + static_cast<int>(rng() % 3));
      rev.assign(ids.rbegin(), ids.rend());
      TaggerModel swapped = model;
      std::swap(swapped.fwd, swapped.bwd);
      swapped.head_w.leftCols(H) = model.head_w.rightCols(H);
      swapped.head_w.rightCols(H) = model.head_w.leftCols(H);
      Eigen::MatrixXd base = bilstm_forward(ids, model);
      Eigen::MatrixXd mirrored = bilstm_forward(rev, swapped);
      for (int t = 0; t < T; ++t)
        worst = std::max(
            worst, (base.row(t) - mirrored.row(T - 1 - t)).cwiseAbs().maxCoeff());
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail),
                  "zero-state exact; reversal max dev %.2e", worst);
    return {worst < 1e-12, detail};
  });

  // Renderers are bit-exact against Unicode and the bundled BRF table.
  criterion("renderer-bit-exactness", 5.0, []() -> std::pair<bool, std::string> {
    BrailleAsciiTable table =
        BrailleAsciiTable::from_file(testutil::data_path("braille_ascii.tsv"));
    for (int mask = 0; mask < 64; ++mask) {
      BrailleSequence seq{BrailleCell(static_cast<uint8_t>(mask))};
      std::string unicode = to_unicode(seq);
      auto cps = decode_utf8(unicode);
      if (!cps || cps->size() != 1 || (*cps)[0] != 0x2800 + mask)
        return {false, "unicode encode wrong for mask " + std::to_string(mask)};
      if (from_unicode(unicode) != seq)
        return {false, "unicode decode wrong for mask " + std::to_string(mask)};
      if (to_brf(seq)[0] != table.at(static_cast<uint8_t>(mask)))
        return {false, "brf mismatch for mask " + std::to_string(mask)};
      if (parse_dot_notation(to_dot_notation(seq)) != seq)
        return {false, "dot notation not inverse for " + std::to_string(mask)};
    }
    return {true, "all 64 masks round-trip"};
  });

  // 10,000 fuzzed strings across the ten blocks plus ASCII re-concatenate
  // exactly.
  criterion("segmentation-round-trip", 30.0,
            []() -> std::pair<bool, std::string> {
    const std::array<std::pair<char32_t, char32_t>, 12> blocks = {{
        {0x0900, 0x097F}, {0x0980, 0x09FF}, {0x0A00, 0x0A7F},
        {0x0A80, 0x0AFF}, {0x0B00, 0x0B7F}, {0x0B80, 0x0BFF},
        {0x0C00, 0x0C7F}, {0x0C80, 0x0CFF}, {0x0D00, 0x0D7F},
        {0x0600, 0x06FF}, {0xFB50, 0xFDFF}, {0x0020, 0x007E},
    }};
    std::mt19937_64 rng(20240715);
    for (int iter = 0; iter < 10000; ++iter) {
      std::string text;
      int n = 1 + static_cast<int>(rng() % 32);
      for (int i = 0; i < n; ++i) {
        auto [lo, hi] = blocks[rng() % blocks.size()];
        append_utf8(text, lo + static_cast<char32_t>(rng() % (hi - lo + 1)));
      }
      Script script = static_cast<Script>(rng() % kScriptCount);
      std::string rebuilt;
      for (const auto& token : segment(text, script)) rebuilt += token.text;
      if (rebuilt != text)
        return {false, "round-trip failed at iteration " +
                           std::to_string(iter)};
    }
    return {true, "10000 strings round-tripped"};
  });

  // Training twice with one seed produces bitwise-identical model files and
  // repeated hybrid translation is stable.
  criterion("determinism", 60.0, [&]() -> std::pair<bool, std::string> {
    RuleTable table = script_table(Script::Devanagari);
    GeneratorOptions options;
    options.pair_count = 40;
    options.inject_rate = 0.12;
    options.seed = 7;
    GeneratedCorpus corpus =
        generate_corpus(table, Script::Devanagari, options);
    TrainOptions train_options;
    train_options.epochs = 8;
    train_options.embed_dim = 16;
    train_options.hidden_dim = 24;
    train_options.seed = 13;
    std::ostringstream file_a, file_b;
    save_model(train_on_corpus(corpus.tagged, table.ambiguity_tags(),
                               train_options, nullptr),
               file_a);
    save_model(train_on_corpus(corpus.tagged, table.ambiguity_tags(),
                               train_options, nullptr),
               file_b);
    if (file_a.str() != file_b.str())
      return {false, "model files differ between identical runs"};
    std::istringstream model_in(file_a.str());
    TaggerModel model = load_model(model_in);
    const std::string text = corpus.pairs.front().source;
    TranslationResult first =
        translate_hybrid(text, table, &model, Script::Devanagari);
    for (int run = 0; run < 20; ++run) {
      TranslationResult again =
          translate_hybrid(text, table, &model, Script::Devanagari);
      if (again.cells != first.cells)
        return {false, "translate_hybrid varied across runs"};
    }
    return {true, "model files identical; translation stable"};
  });

  // Reported accuracy times total equals correct, as exact integers, for
  // every evaluation row produced above.
  criterion("eq3-exactness", 30.0, [&]() -> std::pair<bool, std::string> {
    std::size_t rows_checked = 0;
    for (int scripts = 0; scripts < kScriptCount; ++scripts) {
      Script script = static_cast<Script>(scripts);
      RuleTable table = script_table(script);
      GeneratorOptions options;
      options.pair_count = 30;
      options.inject_rate = 0.05;
      options.seed = 1000 + scripts;
      GeneratedCorpus corpus = generate_corpus(table, script, options);
      EvalReport report = evaluate(corpus.pairs, table, nullptr);
      for (const ScriptResult& row : report.rows) {
        if (std::llround(row.rule_accuracy() * row.rule_total) !=
            row.rule_correct)
          return {false, "rule accuracy not exact"};
        if (std::llround(row.hybrid_accuracy() * row.hybrid_total) !=
            row.hybrid_correct)
          return {false, "hybrid accuracy not exact"};
        if (row.rule_accuracy() !=
            static_cast<double>(row.rule_correct) /
                static_cast<double>(row.rule_total))
          return {false, "accuracy is not the exact integer ratio"};
        ++rows_checked;
      }
    }
    return {true, std::to_string(rows_checked) + " report rows exact"};
  });

  std::printf("================\n%s (%d failure%s)\n",
              failures == 0 ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}
