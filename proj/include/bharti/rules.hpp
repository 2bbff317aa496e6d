#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bharti/braille.hpp"
#include "bharti/script_core.hpp"

namespace bharti {

enum class RuleContext : uint8_t {
  Always,
  WordInitial,
  WordFinal,
  AfterDigit,
  BeforeConsonant,
};

std::string_view rule_context_name(RuleContext context);
std::optional<RuleContext> parse_rule_context(std::string_view name);

// One mapping table row. An empty output deletes (the source is absorbed,
// e.g. a bare nukta). A non-empty tag makes the rule a candidate of the
// ambiguity class keyed by (script, source).
struct Rule {
  std::optional<Script> script;  // nullopt = COMMON (script-neutral) section
  std::string source;            // UTF-8, as authored
  std::u32string source_cps;     // decoded, 1..4 codepoints
  BrailleSequence output;
  std::string tag;
  int priority = 0;
  RuleContext context = RuleContext::Always;
  std::string file;
  int line = 0;
};

struct LintFinding {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string file;
  int line = 0;
  std::string message;
};

// Immutable after load; safe to share across threads.
class RuleTable {
 public:
  struct AmbiguityClass {
    int section;  // script index, or kCommonSection
    std::u32string source;
    std::vector<std::size_t> candidates;  // rule indices in file order
  };

  static constexpr int kCommonSection = kScriptCount;

  RuleTable() = default;
  static RuleTable load_file(const std::string& path);
  static RuleTable load_files(const std::vector<std::string>& paths);
  static RuleTable parse(std::istream& in, const std::string& name);

  // Collects all problems instead of stopping at the first; only I/O
  // failures throw.
  static std::vector<LintFinding> lint_file(const std::string& path);

  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  // One numeral sign precedes each digit run. Sections may override via
  // the @NUMSIGN directive; the fallback is dots 3456.
  BrailleSequence numeral_sign(Script script) const;

  bool has_ambiguity() const { return !classes_.empty(); }
  const std::vector<AmbiguityClass>& ambiguity_classes() const {
    return classes_;
  }
  // Sorted unique tags across all ambiguity candidates.
  std::vector<std::string> ambiguity_tags() const;

  static int section_index(std::optional<Script> script);

  // Matcher internals: rule indices whose source starts with `first`,
  // ordered longest source first, then highest priority, then file order.
  const std::vector<std::size_t>* rules_starting(int section,
                                                 char32_t first) const;
  // Class index for a rule, or -1.
  int class_of(std::size_t rule_index) const;

 private:
  void add_stream(std::istream& in, const std::string& name);
  void finalize();

  std::vector<Rule> rules_;
  std::vector<AmbiguityClass> classes_;
  std::vector<int> rule_class_;
  std::map<std::pair<int, char32_t>, std::vector<std::size_t>> by_first_;
  std::map<int, BrailleSequence> numsign_;  // section -> sign
  std::optional<BrailleSequence> numsign_default_;
};

enum class SegmentType : uint8_t { Cells, Ambiguous, PassThrough, Space };

// One covered token range of the rule pass. Every input token lands in
// exactly one segment.
struct Segment {
  SegmentType type;
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  BrailleSequence cells;                // Cells/Space only
  std::size_t rule = SIZE_MAX;          // Cells matched via this rule
  std::vector<std::size_t> candidates;  // Ambiguous: file-order rule indices
};

struct RulePassOutput {
  std::vector<Segment> segments;
  std::size_t fragment_count = 0;
  std::size_t site_count = 0;
  std::size_t pass_through_count = 0;
  std::size_t space_count = 0;
};

// Greedy longest-match over the token stream; emits ambiguous sites for
// matches that hit an ambiguity class. Total: unmatched tokens become
// pass-throughs, never errors.
RulePassOutput apply_rules(std::span<const SourceToken> tokens,
                           const RuleTable& table, Script script);

}  // namespace bharti
