#include "bharti/rules.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bharti/errors.hpp"

namespace bharti {
namespace {

constexpr std::string_view kContextNames[] = {
    "Always", "WordInitial", "WordFinal", "AfterDigit", "BeforeConsonant"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

bool valid_tag(const std::string& tag) {
  if (tag.empty()) return false;
  for (char c : tag) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

struct ParsedLine {
  bool is_numsign = false;
  Rule rule;
  BrailleSequence numsign;
};

// Parses one data or directive line; returns nullopt for blanks/comments.
std::optional<ParsedLine> parse_line(const std::string& line,
                                     const std::string& name, int lineno) {
  if (line.empty() || line[0] == '#') return std::nullopt;
  std::vector<std::string> fields = split_tabs(line);
  ParsedLine out;
  if (fields[0] == "@NUMSIGN") {
    if (fields.size() != 2)
      throw table_error(name + ": @NUMSIGN takes exactly one DOTS field",
                        lineno);
    try {
      out.numsign = parse_dot_notation(fields[1]);
    } catch (const format_error& e) {
      throw table_error(name + ": " + e.what(), lineno);
    }
    if (out.numsign.empty())
      throw table_error(name + ": @NUMSIGN must not be empty", lineno);
    out.is_numsign = true;
    return out;
  }
  if (fields.size() < 3 || fields.size() > 6)
    throw table_error(name + ": expected SCRIPT\\tSOURCE\\tDOTS with up to "
                             "three optional fields",
                      lineno);
  Rule& rule = out.rule;
  if (fields[0] != "COMMON") {
    auto script = parse_script(fields[0]);
    if (!script)
      throw table_error(name + ": unknown script name '" + fields[0] + "'",
                        lineno);
    rule.script = *script;
  }
  rule.source = fields[1];
  auto cps = decode_utf8(rule.source);
  if (!cps || cps->empty())
    throw table_error(name + ": SOURCE must be non-empty UTF-8", lineno);
  if (cps->size() > 4)
    throw table_error(name + ": SOURCE longer than 4 codepoints", lineno);
  rule.source_cps = *cps;
  try {
    rule.output = parse_dot_notation(fields[2]);
  } catch (const format_error& e) {
    throw table_error(name + ": " + e.what(), lineno);
  }
  if (fields.size() > 3 && !fields[3].empty()) {
    if (!valid_tag(fields[3]))
      throw table_error(name + ": TAG must be an ASCII identifier", lineno);
    rule.tag = fields[3];
  }
  if (fields.size() > 4 && !fields[4].empty()) {
    try {
      std::size_t used = 0;
      rule.priority = std::stoi(fields[4], &used);
      if (used != fields[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw table_error(name + ": PRIORITY must be an integer", lineno);
    }
  }
  if (fields.size() > 5 && !fields[5].empty()) {
    auto ctx = parse_rule_context(fields[5]);
    if (!ctx)
      throw table_error(name + ": unknown context keyword '" + fields[5] + "'",
                        lineno);
    rule.context = *ctx;
  }
  rule.file = name;
  rule.line = lineno;
  return out;
}

}  // namespace

std::string_view rule_context_name(RuleContext context) {
  return kContextNames[static_cast<int>(context)];
}

std::optional<RuleContext> parse_rule_context(std::string_view text) {
  std::string l = lower(text);
  for (int i = 0; i < static_cast<int>(std::size(kContextNames)); ++i)
    if (lower(kContextNames[i]) == l) return static_cast<RuleContext>(i);
  return std::nullopt;
}

int RuleTable::section_index(std::optional<Script> script) {
  return script ? static_cast<int>(*script) : kCommonSection;
}

void RuleTable::add_stream(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  std::optional<int> current_section;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto parsed = parse_line(line, name, lineno);
    if (!parsed) continue;
    if (parsed->is_numsign) {
      if (current_section)
        numsign_[*current_section] = parsed->numsign;
      else
        numsign_default_ = parsed->numsign;
      continue;
    }
    current_section = section_index(parsed->rule.script);
    rules_.push_back(std::move(parsed->rule));
  }
}

void RuleTable::finalize() {
  // Group by (section, source): duplicates must form a tagged class.
  std::map<std::pair<int, std::u32string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    groups[{section_index(rules_[i].script), rules_[i].source_cps}].push_back(
        i);
  rule_class_.assign(rules_.size(), -1);
  for (auto& [key, members] : groups) {
    if (members.size() == 1) continue;
    // Report at the row that created the duplicate.
    const Rule& dup = rules_[members[1]];
    std::set<std::string> tags;
    for (std::size_t idx : members) {
      const Rule& r = rules_[idx];
      if (r.tag.empty())
        throw table_error(dup.file + ": duplicate (script, source) '" +
                              dup.source + "' without a distinct tag",
                          dup.line);
      if (!tags.insert(r.tag).second)
        throw table_error(r.file + ": duplicate tag '" + r.tag +
                              "' for source '" + r.source + "'",
                          r.line);
    }
    for (std::size_t idx : members)
      rule_class_[idx] = static_cast<int>(classes_.size());
    // Candidate order follows retrieval order: priority, then file order.
    std::stable_sort(members.begin(), members.end(),
                     [this](std::size_t a, std::size_t b) {
                       return rules_[a].priority > rules_[b].priority;
                     });
    classes_.push_back({key.first, key.second, members});
  }
  for (std::size_t i = 0; i < rules_.size(); ++i)
    by_first_[{section_index(rules_[i].script), rules_[i].source_cps[0]}]
        .push_back(i);
  for (auto& [key, indices] : by_first_) {
    std::sort(indices.begin(), indices.end(),
              [this](std::size_t a, std::size_t b) {
                const Rule& ra = rules_[a];
                const Rule& rb = rules_[b];
                if (ra.source_cps.size() != rb.source_cps.size())
                  return ra.source_cps.size() > rb.source_cps.size();
                if (ra.priority != rb.priority) return ra.priority > rb.priority;
                return a < b;
              });
  }
}

RuleTable RuleTable::parse(std::istream& in, const std::string& name) {
  RuleTable table;
  table.add_stream(in, name);
  table.finalize();
  return table;
}

RuleTable RuleTable::load_file(const std::string& path) {
  return load_files({path});
}

RuleTable RuleTable::load_files(const std::vector<std::string>& paths) {
  RuleTable table;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw table_error("cannot open table: " + path, 0);
    table.add_stream(in, path);
  }
  table.finalize();
  return table;
}

std::vector<LintFinding> RuleTable::lint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw table_error("cannot open table: " + path, 0);
  std::vector<LintFinding> findings;
  RuleTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      auto parsed = parse_line(line, path, lineno);
      if (!parsed || parsed->is_numsign) continue;
      table.rules_.push_back(std::move(parsed->rule));
    } catch (const table_error& e) {
      findings.push_back({LintFinding::Severity::Error, path, lineno,
                          e.what()});
    }
  }
  try {
    table.finalize();
  } catch (const table_error& e) {
    findings.push_back({LintFinding::Severity::Error, path, e.line(),
                        e.what()});
    return findings;
  }
  if (table.rules_.empty())
    findings.push_back(
        {LintFinding::Severity::Warning, path, 0, "no rules in table"});
  // Classes whose candidates are indistinguishable in output.
  for (const auto& cls : table.classes_) {
    std::set<std::string> outputs;
    for (std::size_t idx : cls.candidates)
      outputs.insert(to_dot_notation(table.rules_[idx].output));
    if (outputs.size() < cls.candidates.size()) {
      const Rule& r = table.rules_[cls.candidates.front()];
      findings.push_back({LintFinding::Severity::Warning, path, r.line,
                          "ambiguity class '" + r.source +
                              "' has candidates with identical output"});
    }
  }
  // Unreachable candidates: same class, same context and same output as an
  // earlier candidate, so neither rule-only nor model resolution can ever
  // produce anything the earlier candidate would not.
  for (const auto& cls : table.classes_) {
    for (std::size_t a = 1; a < cls.candidates.size(); ++a) {
      const Rule& ra = table.rules_[cls.candidates[a]];
      for (std::size_t b = 0; b < a; ++b) {
        const Rule& rb = table.rules_[cls.candidates[b]];
        if (ra.context == rb.context && ra.output == rb.output) {
          findings.push_back(
              {LintFinding::Severity::Warning, path, ra.line,
               "candidate '" + ra.tag + "' of '" + ra.source +
                   "' is shadowed by '" + rb.tag + "' (same context and "
                   "output)"});
          break;
        }
      }
    }
  }
  return findings;
}

BrailleSequence RuleTable::numeral_sign(Script script) const {
  auto it = numsign_.find(static_cast<int>(script));
  if (it != numsign_.end()) return it->second;
  if (numsign_default_) return *numsign_default_;
  return {BrailleCell::from_dots({3, 4, 5, 6})};
}

std::vector<std::string> RuleTable::ambiguity_tags() const {
  std::set<std::string> tags;
  for (const auto& cls : classes_)
    for (std::size_t idx : cls.candidates) tags.insert(rules_[idx].tag);
  return {tags.begin(), tags.end()};
}

const std::vector<std::size_t>* RuleTable::rules_starting(
    int section, char32_t first) const {
  auto it = by_first_.find({section, first});
  if (it == by_first_.end()) return nullptr;
  return &it->second;
}

int RuleTable::class_of(std::size_t rule_index) const {
  return rule_class_[rule_index];
}

namespace {

struct TokenView {
  std::u32string cps;  // empty when the token is not valid UTF-8
};

bool context_holds(RuleContext ctx, std::span<const SourceToken> tokens,
                   std::size_t begin, std::size_t end) {
  switch (ctx) {
    case RuleContext::Always:
      return true;
    case RuleContext::WordInitial:
      return begin == 0 || tokens[begin - 1].kind == TokenKind::Whitespace;
    case RuleContext::WordFinal:
      return end == tokens.size() ||
             tokens[end].kind == TokenKind::Whitespace;
    case RuleContext::AfterDigit:
      return begin > 0 && tokens[begin - 1].kind == TokenKind::Digit;
    case RuleContext::BeforeConsonant:
      return end < tokens.size() && tokens[end].kind == TokenKind::Letter;
  }
  return false;
}

// Token belongs to the section the matcher is searching.
bool section_compatible(const SourceToken& token, Script script, int section) {
  if (section == RuleTable::kCommonSection) return !token.script.has_value();
  return token.script == script;
}

struct Match {
  bool ok = false;
  std::size_t token_end = 0;
  bool ambiguous = false;
  std::size_t rule = SIZE_MAX;
  std::vector<std::size_t> candidates;
};

Match try_match(std::span<const SourceToken> tokens,
                const std::vector<TokenView>& views, std::size_t i,
                int section, Script script, const RuleTable& table) {
  Match result;
  if (views[i].cps.empty()) return result;
  const auto* starts = table.rules_starting(section, views[i].cps[0]);
  if (!starts) return result;
  std::set<int> classes_tried;
  for (std::size_t rule_idx : *starts) {
    const Rule& rule = table.rules()[rule_idx];
    int cls = table.class_of(rule_idx);
    if (cls >= 0 && !classes_tried.insert(cls).second) continue;
    // Extend over whole tokens until the source length is covered.
    std::size_t len = rule.source_cps.size();
    std::size_t covered = 0;
    std::size_t j = i;
    bool fits = true;
    while (covered < len) {
      if (j >= tokens.size() || views[j].cps.empty() ||
          !section_compatible(tokens[j], script, section)) {
        fits = false;
        break;
      }
      covered += views[j].cps.size();
      ++j;
    }
    if (!fits || covered != len) continue;
    std::u32string text;
    for (std::size_t k = i; k < j; ++k) text += views[k].cps;
    if (text != rule.source_cps) continue;
    if (cls >= 0) {
      const auto& klass = table.ambiguity_classes()[cls];
      std::vector<std::size_t> applicable;
      for (std::size_t cand : klass.candidates)
        if (context_holds(table.rules()[cand].context, tokens, i, j))
          applicable.push_back(cand);
      if (applicable.empty()) continue;
      result.ok = true;
      result.token_end = j;
      if (applicable.size() == 1) {
        result.rule = applicable.front();
      } else {
        result.ambiguous = true;
        result.candidates = std::move(applicable);
      }
      return result;
    }
    if (!context_holds(rule.context, tokens, i, j)) continue;
    result.ok = true;
    result.token_end = j;
    result.rule = rule_idx;
    return result;
  }
  return result;
}

// Greedy longest-match over the codepoints of one multi-codepoint token
// (Perso-Arabic base+marks). Only unconditional rules participate.
std::optional<BrailleSequence> match_within_token(
    const std::u32string& cps, int section, const RuleTable& table) {
  BrailleSequence cells;
  std::size_t pos = 0;
  while (pos < cps.size()) {
    const auto* starts = table.rules_starting(section, cps[pos]);
    const Rule* chosen = nullptr;
    if (starts) {
      std::set<int> classes_tried;
      for (std::size_t rule_idx : *starts) {
        const Rule& rule = table.rules()[rule_idx];
        int cls = table.class_of(rule_idx);
        if (cls >= 0 && !classes_tried.insert(cls).second) continue;
        std::size_t len = rule.source_cps.size();
        if (pos + len > cps.size() ||
            cps.compare(pos, len, rule.source_cps) != 0)
          continue;
        if (cls >= 0) {
          const auto& klass = table.ambiguity_classes()[cls];
          const Rule* only = nullptr;
          for (std::size_t cand : klass.candidates) {
            if (table.rules()[cand].context == RuleContext::Always) {
              if (only) {
                only = nullptr;  // still ambiguous inside a token
                break;
              }
              only = &table.rules()[cand];
            }
          }
          if (!only) continue;
          chosen = only;
          break;
        }
        if (rule.context != RuleContext::Always) continue;
        chosen = &rule;
        break;
      }
    }
    if (!chosen) return std::nullopt;
    cells.insert(cells.end(), chosen->output.begin(), chosen->output.end());
    pos += chosen->source_cps.size();
  }
  return cells;
}

}  // namespace

RulePassOutput apply_rules(std::span<const SourceToken> tokens,
                           const RuleTable& table, Script script) {
  RulePassOutput out;
  std::vector<TokenView> views(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (auto cps = decode_utf8(tokens[i].text)) views[i].cps = *cps;

  bool in_digit_run = false;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const SourceToken& token = tokens[i];
    if (token.kind == TokenKind::Whitespace) {
      out.segments.push_back(
          {SegmentType::Space, i, i + 1, {BrailleCell()}, SIZE_MAX, {}});
      ++out.space_count;
      in_digit_run = false;
      ++i;
      continue;
    }
    int section = -1;
    if (token.script == script)
      section = static_cast<int>(script);
    else if (!token.script)
      section = RuleTable::kCommonSection;
    Match match;
    if (section >= 0) match = try_match(tokens, views, i, section, script, table);
    if (!match.ok && section >= 0 && views[i].cps.size() > 1) {
      if (auto cells = match_within_token(views[i].cps, section, table)) {
        Segment seg{SegmentType::Cells, i, i + 1, std::move(*cells), SIZE_MAX,
                    {}};
        if (token.kind == TokenKind::Digit) {
          if (!in_digit_run)
            seg.cells.insert(seg.cells.begin(),
                             table.numeral_sign(script).begin(),
                             table.numeral_sign(script).end());
          in_digit_run = true;
        } else {
          in_digit_run = false;
        }
        out.segments.push_back(std::move(seg));
        ++out.fragment_count;
        ++i;
        continue;
      }
    }
    if (!match.ok) {
      out.segments.push_back(
          {SegmentType::PassThrough, i, i + 1, {}, SIZE_MAX, {}});
      ++out.pass_through_count;
      in_digit_run = false;
      ++i;
      continue;
    }
    if (match.ambiguous) {
      out.segments.push_back({SegmentType::Ambiguous, i, match.token_end,
                              {}, SIZE_MAX, std::move(match.candidates)});
      ++out.site_count;
      in_digit_run = false;
      i = match.token_end;
      continue;
    }
    Segment seg{SegmentType::Cells, i, match.token_end,
                table.rules()[match.rule].output, match.rule, {}};
    bool all_digits = true;
    for (std::size_t k = i; k < match.token_end; ++k)
      if (tokens[k].kind != TokenKind::Digit) all_digits = false;
    if (all_digits) {
      if (!in_digit_run) {
        BrailleSequence sign = table.numeral_sign(script);
        seg.cells.insert(seg.cells.begin(), sign.begin(), sign.end());
      }
      in_digit_run = true;
    } else {
      in_digit_run = false;
    }
    out.segments.push_back(std::move(seg));
    ++out.fragment_count;
    i = match.token_end;
  }
  return out;
}

}  // namespace bharti
