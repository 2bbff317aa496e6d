#include "bharti/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bharti/errors.hpp"
#include "bharti/eval.hpp"
#include "bharti/translate.hpp"

namespace bharti {
namespace {

std::optional<Script> resolve_script(const std::string& name,
                                     std::ostream& err) {
  if (name == "auto") return std::nullopt;
  auto script = parse_script(name);
  if (!script) err << "error: unknown script '" << name << "'\n";
  return script;
}

std::string render_cells(const BrailleSequence& cells,
                         const std::string& format) {
  if (format == "brf") return to_brf(cells);
  if (format == "dots") return to_dot_notation(cells);
  return to_unicode(cells);
}

RuleTable load_tables_or_throw(const std::vector<std::string>& paths) {
  if (paths.empty()) throw table_error("no table given", 0);
  return RuleTable::load_files(paths);
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp~";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write " + tmp);
    out << contents;
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      throw error("failed writing " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw error("cannot rename " + tmp + " to " + path);
  }
}

int cmd_translate(const CliConfig& config, std::istream& in, std::ostream& out,
                  std::ostream& err) {
  RuleTable table;
  std::optional<TaggerModel> model;
  try {
    table = load_tables_or_throw(config.tables);
    if (!config.model_path.empty()) model = load_model(config.model_path);
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return kExitLoadError;
  }
  auto script = resolve_script(config.script, err);
  if (config.script != "auto" && !script) return kExitUsage;

  std::unique_ptr<std::ifstream> file_in;
  std::istream* source = &in;
  if (config.input != "-") {
    file_in = std::make_unique<std::ifstream>(config.input);
    if (!*file_in) {
      err << "error: cannot open input " << config.input << '\n';
      return kExitLoadError;
    }
    source = file_in.get();
  }

  std::ostringstream buffer;
  const bool to_file = config.output != "-";
  std::ostream& sink = to_file ? static_cast<std::ostream&>(buffer) : out;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(*source, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      sink << '\n';
      continue;
    }
    TranslationResult result;
    try {
      result = translate_hybrid(line, table,
                                model ? &*model : nullptr, script);
    } catch (const detection_error& e) {
      err << "error: line " << lineno << ": " << e.what() << '\n';
      return kExitDetection;
    } catch (const missing_model_error& e) {
      err << "error: line " << lineno << ": " << e.what() << '\n';
      return kExitMissingModel;
    } catch (const error& e) {
      err << "error: line " << lineno << ": " << e.what() << '\n';
      return kExitLoadError;
    }
    for (std::size_t idx : result.untranslated) {
      const SourceToken& token = result.tokens[idx];
      err << "warning: line " << lineno << ": untranslated \"" << token.text
          << "\" at byte " << token.begin << '\n';
    }
    sink << render_cells(result.cells, config.format) << '\n';
  }
  if (to_file) {
    try {
      atomic_write_file(config.output, buffer.str());
    } catch (const error& e) {
      err << "error: " << e.what() << '\n';
      return kExitLoadError;
    }
  }
  return kExitOk;
}

int cmd_train(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    RuleTable table = load_tables_or_throw(config.tables);
    TaggedCorpus corpus =
        load_tagged_corpus(config.corpus_path, table.ambiguity_tags());
    if (corpus.empty()) {
      err << "error: corpus " << config.corpus_path << " is empty\n";
      return kExitLoadError;
    }
    std::vector<double> trace;
    TaggerModel model =
        train_on_corpus(corpus, table.ambiguity_tags(), config.train, &trace);
    std::ostringstream model_text;
    save_model(model, model_text);
    atomic_write_file(config.model_out, model_text.str());
    if (!config.loss_out.empty()) {
      std::ostringstream loss;
      loss << "epoch\tloss\n";
      for (std::size_t i = 0; i < trace.size(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", trace[i]);
        loss << i << '\t' << buf << '\n';
      }
      atomic_write_file(config.loss_out, loss.str());
    }
    out << "trained on " << corpus.size() << " examples; epochs "
        << config.train.epochs << "; final loss "
        << (trace.empty() ? 0.0 : trace.back()) << '\n';
    return kExitOk;
  } catch (const divergence_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return kExitLoadError;
  }
}

int cmd_evaluate(const CliConfig& config, std::ostream& out,
                 std::ostream& err) {
  try {
    RuleTable table = load_tables_or_throw(config.tables);
    std::vector<GoldPair> pairs = load_gold_corpus(config.gold_path);
    if (pairs.empty()) {
      err << "error: gold corpus is empty\n";
      return kExitLoadError;
    }
    std::optional<TaggerModel> model;
    if (!config.model_path.empty()) model = load_model(config.model_path);
    EvalReport report = evaluate(pairs, table, model ? &*model : nullptr);
    std::string text = render_report(report);
    if (config.output != "-")
      atomic_write_file(config.output, text);
    else
      out << text;
    if (!config.tsv_out.empty())
      atomic_write_file(config.tsv_out, render_report_tsv(report));
    return kExitOk;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return kExitLoadError;
  }
}

int cmd_inspect_table(const CliConfig& config, std::ostream& out,
                      std::ostream& err) {
  bool findings = false;
  for (const std::string& path : config.tables) {
    std::vector<LintFinding> lint;
    try {
      lint = RuleTable::lint_file(path);
    } catch (const error& e) {
      err << "error: " << e.what() << '\n';
      return kExitLoadError;
    }
    for (const LintFinding& finding : lint) {
      const char* severity =
          finding.severity == LintFinding::Severity::Error ? "error"
                                                           : "warning";
      out << finding.file << ':' << finding.line << ": " << severity << ": "
          << finding.message << '\n';
      if (finding.severity == LintFinding::Severity::Error) findings = true;
    }
    // The ambiguity-class listing for clean tables.
    try {
      RuleTable table = RuleTable::load_file(path);
      for (const auto& cls : table.ambiguity_classes()) {
        out << path << ": ambiguity class '"
            << table.rules()[cls.candidates.front()].source << "' [";
        for (std::size_t i = 0; i < cls.candidates.size(); ++i)
          out << (i ? " " : "") << table.rules()[cls.candidates[i]].tag;
        out << "]\n";
      }
    } catch (const table_error&) {
      // already reported through lint findings
    }
  }
  return findings ? kExitFindings : kExitOk;
}

int cmd_gen_corpus(const CliConfig& config, std::ostream& out,
                   std::ostream& err) {
  try {
    RuleTable table = load_tables_or_throw(config.tables);
    auto script = parse_script(config.script);
    if (!script) {
      err << "error: gen-corpus needs --script with a concrete script\n";
      return kExitUsage;
    }
    GeneratorOptions options;
    options.pair_count = config.count;
    options.inject_rate = config.inject_rate;
    options.seed = config.train.seed;
    GeneratedCorpus corpus = generate_corpus(table, *script, options);
    if (corpus.no_ambiguity && config.inject_rate > 0.0)
      err << "warning: table has no ambiguity classes; nothing to inject\n";
    std::ostringstream gold;
    save_gold_corpus(corpus.pairs, gold);
    atomic_write_file(config.gold_out, gold.str());
    if (!config.tagged_out.empty()) {
      std::ostringstream tagged;
      save_tagged_corpus(corpus.tagged, tagged);
      atomic_write_file(config.tagged_out, tagged.str());
    }
    out << corpus.pairs.size() << " pairs, " << corpus.site_count
        << " ambiguous sites\n";
    return kExitOk;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return kExitLoadError;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Indic text to Bharati braille translator"};
  app.require_subcommand(1);
  CliConfig config;

  auto add_tables = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("-t,--table", config.tables,
                                "mapping table file (repeatable)");
    if (required) opt->required();
  };

  CLI::App* translate =
      app.add_subcommand("translate", "translate text to braille");
  add_tables(translate);
  translate->add_option("-m,--model", config.model_path,
                        "tagger model for ambiguous characters");
  translate->add_option("-s,--script", config.script,
                        "script name or 'auto'");
  translate->add_option("-f,--format", config.format)
      ->check(CLI::IsMember({"unicode", "brf", "dots"}))
      ->description("output encoding");
  translate->add_option("-i,--input", config.input, "input file or -");
  translate->add_option("-o,--output", config.output, "output file or -");

  CLI::App* train = app.add_subcommand("train", "train the tagger model");
  add_tables(train);
  train->add_option("-c,--corpus", config.corpus_path, "tagged corpus TSV")
      ->required();
  train->add_option("-o,--model-out", config.model_out, "model file to write")
      ->required();
  train->add_option("--loss-out", config.loss_out, "loss trace TSV");
  train->add_option("--epochs", config.train.epochs);
  train->add_option("--lr", config.train.learning_rate);
  train->add_option("--embed-dim", config.train.embed_dim);
  train->add_option("--hidden-dim", config.train.hidden_dim);
  train->add_option("--layers", config.train.layers);
  train->add_option("--dropout", config.train.dropout);
  train->add_option("--seed", config.train.seed);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score against a gold corpus");
  add_tables(evaluate);
  evaluate->add_option("-g,--gold", config.gold_path, "gold corpus TSV")
      ->required();
  evaluate->add_option("-m,--model", config.model_path, "tagger model");
  evaluate->add_option("-o,--output", config.output, "report file or -");
  evaluate->add_option("--tsv", config.tsv_out, "machine-readable report");

  CLI::App* inspect =
      app.add_subcommand("inspect-table", "lint mapping tables");
  add_tables(inspect);

  CLI::App* gen =
      app.add_subcommand("gen-corpus", "generate a synthetic corpus");
  add_tables(gen);
  gen->add_option("-s,--script", config.script, "script name")->required();
  gen->add_option("-n,--count", config.count, "sentence pairs to generate");
  gen->add_option("--inject", config.inject_rate, "ambiguity injection rate");
  gen->add_option("--seed", config.train.seed);
  gen->add_option("--gold-out", config.gold_out, "gold corpus file")
      ->required();
  gen->add_option("--tagged-out", config.tagged_out, "training corpus file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (translate->parsed())
    return cmd_translate(config, std::cin, std::cout, std::cerr);
  if (train->parsed()) return cmd_train(config, std::cout, std::cerr);
  if (evaluate->parsed()) return cmd_evaluate(config, std::cout, std::cerr);
  if (inspect->parsed()) return cmd_inspect_table(config, std::cout, std::cerr);
  if (gen->parsed()) return cmd_gen_corpus(config, std::cout, std::cerr);
  return kExitUsage;
}

}  // namespace bharti
