#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bharti {

// The ten supported scripts. Enumeration order is the tie-break order for
// script detection and the row order of evaluation reports.
enum class Script : uint8_t {
  Devanagari,
  Bengali,
  Gujarati,
  Kannada,
  Malayalam,
  Odia,
  Gurmukhi,
  Tamil,
  Telugu,
  PersoArabic,
};

inline constexpr int kScriptCount = 10;

const std::array<Script, kScriptCount>& all_scripts();

// Table spelling, e.g. "DEVANAGARI".
std::string_view script_name(Script script);

// Accepts the table spelling case-insensitively, plus the aliases
// "PUNJABI" (Gurmukhi) and "URDU" (PersoArabic).
std::optional<Script> parse_script(std::string_view name);

enum class TokenKind : uint8_t {
  Letter,
  Matra,
  Virama,
  Digit,
  Punctuation,
  Whitespace,
  Other,
};

std::string_view token_kind_name(TokenKind kind);

// One segmented unit: a single codepoint for Brahmic scripts, a base plus
// its combining marks for Perso-Arabic, or one neutral character.
// [begin, end) are byte offsets into the segmented string, and token texts
// concatenate back to it exactly.
struct SourceToken {
  std::string text;
  std::optional<Script> script;  // nullopt = script-neutral
  std::size_t begin = 0;
  std::size_t end = 0;
  TokenKind kind = TokenKind::Other;
};

// Per-codepoint script and kind assignment.
struct CharClass {
  std::optional<Script> script;
  TokenKind kind = TokenKind::Other;
};

// The codepoint classification table driving segmentation. The bundled
// data is compiled in; the same content ships as data/classification.tsv
// (fields CODEPOINT-HEX, SCRIPT, KIND) and can be loaded from file.
class ClassificationTable {
 public:
  static const ClassificationTable& builtin();
  static ClassificationTable from_file(const std::string& path);

  // Total over all codepoints: unlisted ones fall back to neutral
  // whitespace/digit/punctuation/other classes.
  CharClass classify(char32_t cp) const;

  std::size_t size() const { return rows_.size(); }
  bool same_rows(const ClassificationTable& other) const;

 private:
  struct Row {
    char32_t cp;
    CharClass cls;
  };
  std::vector<Row> rows_;  // sorted by codepoint
};

// UTF-8 helpers. decode_utf8 rejects malformed input with std::nullopt;
// the segmenter itself never rejects (invalid bytes pass through as Other).
std::optional<std::u32string> decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Canonical composition (NFC) over the supported script blocks. Codepoints
// outside the bundled tables are passed through untouched.
std::string normalize_nfc(std::string_view text);

// Majority script of the text's script-owned codepoints; ties break in
// enum order. std::nullopt when no codepoint belongs to a supported script.
std::optional<Script> detect_script(
    std::string_view text,
    const ClassificationTable& table = ClassificationTable::builtin());

// Splits text into SourceTokens against the given script. Codepoints of
// other scripts come out as kind Other. The input is segmented as-is;
// callers wanting canonical form normalize first (the pipeline does).
std::vector<SourceToken> segment(
    std::string_view text, Script script,
    const ClassificationTable& table = ClassificationTable::builtin());

}  // namespace bharti
