#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bharti/rules.hpp"
#include "bharti/tagger.hpp"
#include "bharti/translate.hpp"

namespace bharti {

struct GoldPair {
  Script script = Script::Devanagari;
  std::string source;
  BrailleSequence gold;
};

struct CellCount {
  long long correct = 0;
  long long total = 0;
};

// Cell accuracy: both sequences split into words on blank cells, words
// paired in order, cells compared positionally. Total counts the larger of
// the two word lengths, so surplus as well as missing cells score as
// incorrect. Blank separator cells themselves are not scored.
CellCount accuracy(const BrailleSequence& predicted,
                   const BrailleSequence& gold);

struct GeneratorOptions {
  std::size_t pair_count = 100;
  double inject_rate = 0.1;   // ambiguity-class instances per letter token
  uint64_t seed = 1;
  int min_words = 3;
  int max_words = 7;
  int min_word_len = 4;
  int max_word_len = 8;
  double digit_word_rate = 0.08;
  double punct_rate = 0.05;   // trailing punctuation per word
};

struct GeneratedCorpus {
  std::vector<GoldPair> pairs;
  TaggedCorpus tagged;        // words containing at least one site
  std::size_t site_count = 0;
  bool no_ambiguity = false;  // table had no classes to inject
};

// Samples pseudo-words from the table's source inventory. Gold braille is
// composed directly from rule outputs; ambiguous sites are resolved by the
// deterministic context oracle (first candidate word-finally, second
// otherwise), which is also what the emitted gold tags encode.
GeneratedCorpus generate_corpus(const RuleTable& table, Script script,
                                const GeneratorOptions& options);

struct ScriptResult {
  Script script = Script::Devanagari;
  long long rule_correct = 0;
  long long rule_total = 0;
  long long hybrid_correct = 0;
  long long hybrid_total = 0;
  std::size_t untranslated = 0;
  std::size_t model_sites = 0;
  std::size_t pairs = 0;
  std::size_t errors = 0;

  double rule_accuracy() const;    // 0/0 reports as 1.0
  double hybrid_accuracy() const;
};

struct EvalReport {
  std::vector<ScriptResult> rows;  // evaluation-report script order
};

// Rule-only and hybrid passes over every pair. Without a model the hybrid
// column equals the rule-only column. Per-pair translation failures are
// recorded in `errors` with the pair's gold counted as missed.
EvalReport evaluate(const std::vector<GoldPair>& pairs, const RuleTable& table,
                    const TaggerModel* model = nullptr);

// Aligned text table with the columns Script, Rule Based, LSTM, Total.
std::string render_report(const EvalReport& report);
// Machine-readable TSV with the same four columns.
std::string render_report_tsv(const EvalReport& report);

// Model choice vs gold tag over the ambiguous sites of a tagged corpus;
// candidates come from the table's class of each site token.
struct SiteAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
};
SiteAccuracy site_accuracy(const TaggedCorpus& corpus, const RuleTable& table,
                           const TaggerModel& model);

// Gold corpus TSV: SCRIPT, SOURCE, gold dot-notation with "/" between
// words (each "/" stands for one blank separator cell).
void save_gold_corpus(const std::vector<GoldPair>& pairs, std::ostream& out);
std::vector<GoldPair> load_gold_corpus(const std::string& path);

}  // namespace bharti
