#include "bharti/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "bharti/errors.hpp"

namespace bharti {
namespace {

std::vector<BrailleSequence> split_words(const BrailleSequence& seq) {
  std::vector<BrailleSequence> words(1);
  for (BrailleCell cell : seq) {
    if (cell.blank())
      words.emplace_back();
    else
      words.back().push_back(cell);
  }
  return words;
}

double ratio(long long correct, long long total) {
  if (total == 0) return 1.0;  // vacuous evaluations read as perfect
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

CellCount accuracy(const BrailleSequence& predicted,
                   const BrailleSequence& gold) {
  std::vector<BrailleSequence> pred_words = split_words(predicted);
  std::vector<BrailleSequence> gold_words = split_words(gold);
  CellCount count;
  std::size_t words = std::max(pred_words.size(), gold_words.size());
  for (std::size_t w = 0; w < words; ++w) {
    const BrailleSequence* p = w < pred_words.size() ? &pred_words[w] : nullptr;
    const BrailleSequence* g = w < gold_words.size() ? &gold_words[w] : nullptr;
    std::size_t plen = p ? p->size() : 0;
    std::size_t glen = g ? g->size() : 0;
    count.total += static_cast<long long>(std::max(plen, glen));
    for (std::size_t i = 0; i < std::min(plen, glen); ++i)
      if ((*p)[i] == (*g)[i]) ++count.correct;
  }
  return count;
}

namespace {

struct SourcePool {
  // Unambiguous rules usable as word tokens; `initial` restricts the first
  // position to Letter-kind sources.
  std::vector<std::size_t> letters;
  std::vector<std::size_t> initial;
  std::vector<std::size_t> digits;
  std::vector<std::size_t> punct;
  std::vector<int> classes;  // ambiguity class indices for this script
};

SourcePool build_pool(const RuleTable& table, Script script) {
  SourcePool pool;
  const auto& cls_table = ClassificationTable::builtin();
  const int section = RuleTable::section_index(script);
  for (std::size_t i = 0; i < table.rules().size(); ++i) {
    const Rule& rule = table.rules()[i];
    int rule_section = RuleTable::section_index(rule.script);
    if (rule_section != section) continue;
    if (table.class_of(i) >= 0) continue;
    if (rule.context != RuleContext::Always) continue;
    if (rule.output.empty()) continue;  // deletion rules need their base
    TokenKind kind = cls_table.classify(rule.source_cps[0]).kind;
    if (kind == TokenKind::Digit && rule.source_cps.size() == 1) {
      pool.digits.push_back(i);
    } else if (kind == TokenKind::Letter || kind == TokenKind::Matra) {
      pool.letters.push_back(i);
      if (kind == TokenKind::Letter) pool.initial.push_back(i);
    }
  }
  // Script-neutral punctuation: usable regardless of script.
  for (std::size_t i = 0; i < table.rules().size(); ++i) {
    const Rule& rule = table.rules()[i];
    if (rule.script.has_value()) continue;
    if (table.class_of(i) >= 0 || rule.output.empty()) continue;
    if (cls_table.classify(rule.source_cps[0]).kind == TokenKind::Punctuation)
      pool.punct.push_back(i);
  }
  for (std::size_t c = 0; c < table.ambiguity_classes().size(); ++c)
    if (table.ambiguity_classes()[c].section == section)
      pool.classes.push_back(static_cast<int>(c));
  return pool;
}

struct PlannedToken {
  std::size_t rule = SIZE_MAX;  // unambiguous pick
  int cls = -1;                 // or an ambiguity class
};

uint64_t pick(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

GeneratedCorpus generate_corpus(const RuleTable& table, Script script,
                                const GeneratorOptions& options) {
  if (options.pair_count == 0) throw error("pair_count must be positive");
  SourcePool pool = build_pool(table, script);
  if (pool.letters.empty() || pool.initial.empty())
    throw error("table has no usable letter sources for " +
                std::string(script_name(script)));
  GeneratedCorpus corpus;
  corpus.no_ambiguity = pool.classes.empty();
  const double inject =
      corpus.no_ambiguity ? 0.0 : std::clamp(options.inject_rate, 0.0, 1.0);
  std::mt19937_64 rng(options.seed);

  const auto plan_word = [&](bool digits) -> std::vector<PlannedToken> {
    std::vector<PlannedToken> plan;
    if (digits) {
      int len = 1 + static_cast<int>(pick(rng, 4));
      for (int i = 0; i < len; ++i)
        plan.push_back({pool.digits[pick(rng, pool.digits.size())], -1});
      return plan;
    }
    int len = options.min_word_len +
              static_cast<int>(pick(
                  rng, static_cast<uint64_t>(options.max_word_len -
                                             options.min_word_len + 1)));
    for (int i = 0; i < len; ++i) {
      if (inject > 0.0 && unit(rng) < inject) {
        plan.push_back({SIZE_MAX, pool.classes[pick(rng, pool.classes.size())]});
      } else if (i == 0) {
        plan.push_back({pool.initial[pick(rng, pool.initial.size())], -1});
      } else {
        plan.push_back({pool.letters[pick(rng, pool.letters.size())], -1});
      }
    }
    if (!pool.punct.empty() && unit(rng) < options.punct_rate)
      plan.push_back({pool.punct[pick(rng, pool.punct.size())], -1});
    return plan;
  };

  // The oracle: first candidate word-finally, second otherwise.
  const auto oracle_candidate = [&](const RuleTable::AmbiguityClass& cls,
                                    bool word_final) -> std::size_t {
    return word_final ? cls.candidates.front() : cls.candidates[1];
  };

  // A planned word is usable when the real pipeline reproduces it: each
  // planned source must come back as one segment, ambiguous exactly where
  // planned. Gold is still composed from the plan, not from the engine.
  const auto realize_word =
      [&](const std::vector<PlannedToken>& plan, std::string& text,
          BrailleSequence& gold, std::vector<std::string>& tokens,
          std::vector<std::string>& tags, bool& has_site) -> bool {
    text.clear();
    for (const auto& item : plan) {
      const Rule& rule =
          item.cls >= 0
              ? table.rules()[table.ambiguity_classes()[item.cls]
                                  .candidates.front()]
              : table.rules()[item.rule];
      text += rule.source;
    }
    std::string nfc = normalize_nfc(text);
    if (nfc != text) return false;  // sampled sources must not recombine
    std::vector<SourceToken> toks = segment(nfc, script);
    RulePassOutput pass = apply_rules(toks, table, script);
    std::vector<const Segment*> content;
    for (const Segment& seg : pass.segments) content.push_back(&seg);
    if (content.size() != plan.size()) return false;
    bool digit_run_open = false;
    gold.clear();
    tags.assign(toks.size(), "O");
    has_site = false;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const Segment& seg = *content[i];
      const PlannedToken& item = plan[i];
      if (item.cls >= 0) {
        if (seg.type != SegmentType::Ambiguous) return false;
        const auto& cls = table.ambiguity_classes()[item.cls];
        if (table.class_of(seg.candidates.front()) !=
            item.cls)
          return false;
        bool word_final = i + 1 == plan.size();
        std::size_t chosen = oracle_candidate(cls, word_final);
        const Rule& rule = table.rules()[chosen];
        gold.insert(gold.end(), rule.output.begin(), rule.output.end());
        tags[seg.token_begin] = rule.tag;
        has_site = true;
        digit_run_open = false;
      } else {
        if (seg.type != SegmentType::Cells || seg.rule != item.rule)
          return false;
        const Rule& rule = table.rules()[item.rule];
        TokenKind kind = toks[seg.token_begin].kind;
        if (kind == TokenKind::Digit) {
          if (!digit_run_open) {
            BrailleSequence sign = table.numeral_sign(script);
            gold.insert(gold.end(), sign.begin(), sign.end());
            digit_run_open = true;
          }
        } else {
          digit_run_open = false;
        }
        gold.insert(gold.end(), rule.output.begin(), rule.output.end());
      }
    }
    tokens.clear();
    for (const auto& tok : toks) tokens.push_back(tok.text);
    return true;
  };

  for (std::size_t p = 0; p < options.pair_count; ++p) {
    int words = options.min_words +
                static_cast<int>(pick(
                    rng, static_cast<uint64_t>(options.max_words -
                                               options.min_words + 1)));
    GoldPair pair;
    pair.script = script;
    for (int w = 0; w < words; ++w) {
      std::string text;
      BrailleSequence gold;
      std::vector<std::string> tokens;
      std::vector<std::string> tags;
      bool has_site = false;
      bool ok = false;
      for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
        bool digits =
            !pool.digits.empty() && unit(rng) < options.digit_word_rate;
        ok = realize_word(plan_word(digits), text, gold, tokens, tags,
                          has_site);
      }
      if (!ok) throw error("corpus generator failed to realize a word");
      if (w > 0) {
        pair.source += ' ';
        pair.gold.push_back(BrailleCell());
      }
      pair.source += text;
      pair.gold.insert(pair.gold.end(), gold.begin(), gold.end());
      if (has_site) {
        TaggedSentence sentence;
        sentence.script = script;
        sentence.tokens = std::move(tokens);
        sentence.tags = std::move(tags);
        for (const auto& tag : sentence.tags)
          if (tag != "O") ++corpus.site_count;
        corpus.tagged.push_back(std::move(sentence));
      }
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

double ScriptResult::rule_accuracy() const {
  return ratio(rule_correct, rule_total);
}

double ScriptResult::hybrid_accuracy() const {
  return ratio(hybrid_correct, hybrid_total);
}

EvalReport evaluate(const std::vector<GoldPair>& pairs, const RuleTable& table,
                    const TaggerModel* model) {
  std::array<ScriptResult, kScriptCount> rows;
  std::array<bool, kScriptCount> present{};
  for (int i = 0; i < kScriptCount; ++i)
    rows[i].script = static_cast<Script>(i);
  for (const GoldPair& pair : pairs) {
    ScriptResult& row = rows[static_cast<int>(pair.script)];
    present[static_cast<int>(pair.script)] = true;
    ++row.pairs;
    long long gold_cells = 0;
    for (BrailleCell cell : pair.gold)
      if (!cell.blank()) ++gold_cells;
    try {
      TranslationResult rule_only =
          translate_hybrid(pair.source, table, nullptr, pair.script,
                           Resolution::FirstCandidate);
      CellCount rc = accuracy(rule_only.cells, pair.gold);
      row.rule_correct += rc.correct;
      row.rule_total += rc.total;
      if (model) {
        TranslationResult hybrid = translate_hybrid(
            pair.source, table, model, pair.script, Resolution::Hybrid);
        CellCount hc = accuracy(hybrid.cells, pair.gold);
        row.hybrid_correct += hc.correct;
        row.hybrid_total += hc.total;
        row.model_sites += hybrid.model_sites;
        row.untranslated += hybrid.untranslated.size();
      } else {
        row.hybrid_correct += rc.correct;
        row.hybrid_total += rc.total;
        row.untranslated += rule_only.untranslated.size();
      }
    } catch (const error&) {
      ++row.errors;
      row.rule_total += gold_cells;
      row.hybrid_total += gold_cells;
    }
  }
  EvalReport report;
  for (int i = 0; i < kScriptCount; ++i)
    if (present[i]) report.rows.push_back(rows[i]);
  return report;
}

namespace {

std::string_view display_name(Script script) {
  switch (script) {
    case Script::Gurmukhi:
      return "Punjabi";
    case Script::PersoArabic:
      return "Urdu";
    default:
      break;
  }
  static const std::array<std::string, kScriptCount> names = [] {
    std::array<std::string, kScriptCount> out;
    for (int i = 0; i < kScriptCount; ++i) {
      std::string name(script_name(static_cast<Script>(i)));
      for (std::size_t k = 1; k < name.size(); ++k)
        name[k] = static_cast<char>(
            name[k] >= 'A' && name[k] <= 'Z' ? name[k] - 'A' + 'a' : name[k]);
      out[i] = name;
    }
    return out;
  }();
  return names[static_cast<int>(script)];
}

std::string format_accuracy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string render_report(const EvalReport& report) {
  std::ostringstream out;
  out << "Script        Rule Based    LSTM      Total\n";
  std::size_t sites = 0, untranslated = 0, errors = 0;
  for (const ScriptResult& row : report.rows) {
    std::string name(display_name(row.script));
    name.resize(14, ' ');
    std::string rule = format_accuracy(row.rule_accuracy());
    rule.resize(14, ' ');
    std::string hybrid = format_accuracy(row.hybrid_accuracy());
    hybrid.resize(10, ' ');
    out << name << rule << hybrid << row.hybrid_total << '\n';
    sites += row.model_sites;
    untranslated += row.untranslated;
    errors += row.errors;
  }
  out << "model-resolved sites: " << sites
      << "; untranslated tokens: " << untranslated;
  if (errors) out << "; failed pairs: " << errors;
  out << '\n';
  return out.str();
}

std::string render_report_tsv(const EvalReport& report) {
  std::ostringstream out;
  out << "Script\tRule Based\tLSTM\tTotal\n";
  for (const ScriptResult& row : report.rows)
    out << display_name(row.script) << '\t'
        << format_accuracy(row.rule_accuracy()) << '\t'
        << format_accuracy(row.hybrid_accuracy()) << '\t' << row.hybrid_total
        << '\n';
  return out.str();
}

SiteAccuracy site_accuracy(const TaggedCorpus& corpus, const RuleTable& table,
                           const TaggerModel& model) {
  SiteAccuracy result;
  for (const TaggedSentence& sentence : corpus) {
    std::vector<SiteQuery> queries;
    std::vector<std::string> gold;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      if (sentence.tags[i] == "O") continue;
      auto cps = decode_utf8(sentence.tokens[i]);
      if (!cps) continue;
      int section = RuleTable::section_index(sentence.script);
      const RuleTable::AmbiguityClass* cls = nullptr;
      for (const auto& candidate : table.ambiguity_classes())
        if (candidate.section == section && candidate.source == *cps)
          cls = &candidate;
      if (!cls) continue;
      SiteQuery query;
      query.position = i;
      for (std::size_t cand : cls->candidates)
        query.candidate_tags.push_back(table.rules()[cand].tag);
      queries.push_back(std::move(query));
      gold.push_back(sentence.tags[i]);
    }
    if (queries.empty()) continue;
    std::vector<std::size_t> choice =
        disambiguate(sentence.tokens, queries, model);
    for (std::size_t k = 0; k < choice.size(); ++k) {
      ++result.total;
      if (queries[k].candidate_tags[choice[k]] == gold[k]) ++result.correct;
    }
  }
  return result;
}

void save_gold_corpus(const std::vector<GoldPair>& pairs, std::ostream& out) {
  for (const GoldPair& pair : pairs) {
    out << script_name(pair.script) << '\t' << pair.source << '\t';
    std::vector<BrailleSequence> words = split_words(pair.gold);
    for (std::size_t w = 0; w < words.size(); ++w)
      out << (w ? "/" : "") << to_dot_notation(words[w]);
    out << '\n';
  }
}

std::vector<GoldPair> load_gold_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw corpus_error("cannot open gold corpus: " + path, 0);
  std::vector<GoldPair> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string script_field, source, gold_field;
    if (!std::getline(fields, script_field, '\t') ||
        !std::getline(fields, source, '\t') ||
        !std::getline(fields, gold_field))
      throw corpus_error("expected SCRIPT\\tSOURCE\\tGOLD", lineno);
    auto script = parse_script(script_field);
    if (!script)
      throw corpus_error("unknown script '" + script_field + "'", lineno);
    GoldPair pair;
    pair.script = *script;
    pair.source = source;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= gold_field.size()) {
      auto slash = gold_field.find('/', pos);
      std::string word = gold_field.substr(
          pos, slash == std::string::npos ? std::string::npos : slash - pos);
      if (!first) pair.gold.push_back(BrailleCell());
      first = false;
      try {
        BrailleSequence cells = parse_dot_notation(word);
        pair.gold.insert(pair.gold.end(), cells.begin(), cells.end());
      } catch (const format_error& e) {
        throw corpus_error(std::string("bad gold notation: ") + e.what(),
                           lineno);
      }
      if (slash == std::string::npos) break;
      pos = slash + 1;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace bharti
