#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bharti/rules.hpp"
#include "bharti/tagger.hpp"

namespace bharti {

enum class Provenance : uint8_t { Rule, Model, Space, PassThrough };

struct OutputFragment {
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  BrailleSequence cells;
  Provenance provenance = Provenance::Rule;
  std::string chosen_tag;  // set when a model resolved the site
};

struct TranslationResult {
  Script script = Script::Devanagari;
  std::string normalized;           // NFC text the tokens index into
  std::vector<SourceToken> tokens;
  std::vector<OutputFragment> fragments;  // source order
  BrailleSequence cells;                  // flattened fragment cells
  std::vector<std::size_t> untranslated;  // token indices passed through
  std::size_t model_sites = 0;
};

// How ambiguous sites are resolved. FirstCandidate is the rule-only pass:
// the table's first candidate wins.
enum class Resolution : uint8_t { Hybrid, FirstCandidate };

// The full pipeline: NFC normalization, script detection (unless given),
// segmentation, the rule pass, then per-word model disambiguation of any
// ambiguous sites. Throws detection_error when no script is recognized and
// missing_model_error when a site is hit in Hybrid mode without a model.
TranslationResult translate_hybrid(
    std::string_view text, const RuleTable& table,
    const TaggerModel* model = nullptr,
    std::optional<Script> script = std::nullopt,
    Resolution resolution = Resolution::Hybrid);

}  // namespace bharti
