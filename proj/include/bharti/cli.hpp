#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bharti/tagger.hpp"

namespace bharti {

// Process exit codes shared by all subcommands.
enum ExitCode : int {
  kExitOk = 0,
  kExitFindings = 1,     // inspect-table found problems
  kExitLoadError = 2,    // unreadable/invalid table, model or corpus
  kExitDetection = 3,    // no supported script in the input
  kExitMissingModel = 4, // ambiguous site without a model
  kExitDivergence = 5,   // training diverged
  kExitUsage = 64,
};

struct CliConfig {
  std::string subcommand;
  std::vector<std::string> tables;
  std::string model_path;
  std::string script = "auto";
  std::string format = "unicode";  // unicode | brf | dots
  std::string input = "-";
  std::string output = "-";
  // train
  std::string corpus_path;
  std::string model_out;
  std::string loss_out;
  TrainOptions train;
  // evaluate
  std::string gold_path;
  std::string tsv_out;
  // gen-corpus
  std::size_t count = 100;
  double inject_rate = 0.1;
  std::string gold_out;
  std::string tagged_out;
};

int cmd_translate(const CliConfig& config, std::istream& in, std::ostream& out,
                  std::ostream& err);
int cmd_train(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const CliConfig& config, std::ostream& out,
                 std::ostream& err);
int cmd_inspect_table(const CliConfig& config, std::ostream& out,
                      std::ostream& err);
int cmd_gen_corpus(const CliConfig& config, std::ostream& out,
                   std::ostream& err);

// Parses argv and dispatches; the entry point for the bbraille binary.
int run_cli(int argc, const char* const* argv);

// Writes via a temporary file and renames, so failures leave no partial
// output behind.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace bharti
