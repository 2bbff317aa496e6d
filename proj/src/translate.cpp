#include "bharti/translate.hpp"

#include <algorithm>

#include "bharti/errors.hpp"

namespace bharti {
namespace {

// Maximal run of non-whitespace tokens containing `index`.
std::pair<std::size_t, std::size_t> word_around(
    const std::vector<SourceToken>& tokens, std::size_t index) {
  std::size_t begin = index;
  while (begin > 0 && tokens[begin - 1].kind != TokenKind::Whitespace) --begin;
  std::size_t end = index + 1;
  while (end < tokens.size() && tokens[end].kind != TokenKind::Whitespace)
    ++end;
  return {begin, end};
}

}  // namespace

TranslationResult translate_hybrid(std::string_view text,
                                   const RuleTable& table,
                                   const TaggerModel* model,
                                   std::optional<Script> script_override,
                                   Resolution resolution) {
  TranslationResult result;
  result.normalized = normalize_nfc(text);
  if (script_override) {
    result.script = *script_override;
  } else {
    auto detected = detect_script(result.normalized);
    if (!detected)
      throw detection_error("no codepoint belongs to a supported script");
    result.script = *detected;
  }
  result.tokens = segment(result.normalized, result.script);
  RulePassOutput pass = apply_rules(result.tokens, table, result.script);

  // Resolve ambiguous segments word by word.
  std::vector<std::size_t> resolved(pass.segments.size(), SIZE_MAX);
  std::vector<std::string> resolved_tag(pass.segments.size());
  if (pass.site_count > 0 && resolution == Resolution::Hybrid) {
    if (!model)
      throw missing_model_error(
          "input hits an ambiguity class but no model was supplied");
    std::size_t seg_idx = 0;
    while (seg_idx < pass.segments.size()) {
      const Segment& seg = pass.segments[seg_idx];
      if (seg.type != SegmentType::Ambiguous) {
        ++seg_idx;
        continue;
      }
      auto [word_begin, word_end] =
          word_around(result.tokens, seg.token_begin);
      std::vector<std::string> word_tokens;
      for (std::size_t t = word_begin; t < word_end; ++t)
        word_tokens.push_back(result.tokens[t].text);
      // All sites inside this word resolve with one forward pass.
      std::vector<std::size_t> site_segments;
      std::vector<SiteQuery> queries;
      for (std::size_t s = seg_idx; s < pass.segments.size(); ++s) {
        const Segment& other = pass.segments[s];
        if (other.token_begin >= word_end) break;
        if (other.type != SegmentType::Ambiguous) continue;
        SiteQuery query;
        query.position = other.token_begin - word_begin;
        for (std::size_t cand : other.candidates)
          query.candidate_tags.push_back(table.rules()[cand].tag);
        site_segments.push_back(s);
        queries.push_back(std::move(query));
      }
      std::vector<std::size_t> choice =
          disambiguate(word_tokens, queries, *model);
      for (std::size_t k = 0; k < site_segments.size(); ++k) {
        resolved[site_segments[k]] =
            pass.segments[site_segments[k]].candidates[choice[k]];
        resolved_tag[site_segments[k]] =
            table.rules()[resolved[site_segments[k]]].tag;
      }
      std::size_t next = seg_idx + 1;
      while (next < pass.segments.size() &&
             pass.segments[next].token_begin < word_end)
        ++next;
      seg_idx = next;
    }
  }

  result.fragments.reserve(pass.segments.size());
  for (std::size_t s = 0; s < pass.segments.size(); ++s) {
    const Segment& seg = pass.segments[s];
    OutputFragment frag;
    frag.token_begin = seg.token_begin;
    frag.token_end = seg.token_end;
    switch (seg.type) {
      case SegmentType::Cells:
        frag.cells = seg.cells;
        frag.provenance = Provenance::Rule;
        break;
      case SegmentType::Space:
        frag.cells = seg.cells;
        frag.provenance = Provenance::Space;
        break;
      case SegmentType::PassThrough:
        frag.provenance = Provenance::PassThrough;
        result.untranslated.push_back(seg.token_begin);
        break;
      case SegmentType::Ambiguous: {
        std::size_t rule_idx;
        if (resolution == Resolution::FirstCandidate ||
            resolved[s] == SIZE_MAX) {
          rule_idx = seg.candidates.front();
          frag.provenance = Provenance::Rule;
        } else {
          rule_idx = resolved[s];
          frag.provenance = Provenance::Model;
          frag.chosen_tag = resolved_tag[s];
          ++result.model_sites;
        }
        frag.cells = table.rules()[rule_idx].output;
        break;
      }
    }
    result.cells.insert(result.cells.end(), frag.cells.begin(),
                        frag.cells.end());
    result.fragments.push_back(std::move(frag));
  }
  return result;
}

}  // namespace bharti
