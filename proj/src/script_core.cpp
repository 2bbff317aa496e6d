#include "bharti/script_core.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bharti/errors.hpp"

namespace bharti {
namespace {

// Script tag space of the classification data: the ten scripts plus the
// script-neutral COMMON bucket (danda, double danda).
enum class Script_ : uint8_t {
  Devanagari,
  Bengali,
  Gujarati,
  Kannada,
  Malayalam,
  Odia,
  Gurmukhi,
  Tamil,
  Telugu,
  Persoarabic,
  Common,
};

struct ClassificationRow {
  char32_t cp;
  Script_ script;
  TokenKind kind;
};
struct DecompositionRow {
  char32_t cp;
  char32_t first;
  char32_t second;  // 0 for singleton decompositions
};
struct CombiningClassRow {
  char32_t cp;
  uint8_t ccc;
};
struct CompositionRow {
  char32_t first;
  char32_t second;
  char32_t composite;
};

#include "unicode_data.inc"

std::optional<Script> to_script(Script_ s) {
  if (s == Script_::Common) return std::nullopt;
  return static_cast<Script>(static_cast<uint8_t>(s));
}

uint8_t ccc_of(char32_t cp) {
  for (const auto& row : kCombiningClassRows)
    if (row.cp == cp) return row.ccc;
  return 0;
}

const DecompositionRow* decomposition_of(char32_t cp) {
  for (const auto& row : kDecompositionRows)
    if (row.cp == cp) return &row;
  return nullptr;
}

char32_t composite_of(char32_t a, char32_t b) {
  for (const auto& row : kCompositionRows)
    if (row.first == a && row.second == b) return row.composite;
  return 0;
}

void decompose_into(char32_t cp, std::u32string& out) {
  if (const DecompositionRow* d = decomposition_of(cp)) {
    decompose_into(d->first, out);
    if (d->second) decompose_into(d->second, out);
  } else {
    out.push_back(cp);
  }
}

// Stable bubble of combining marks into canonical order.
void canonical_order(std::u32string& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    uint8_t c = ccc_of(s[i]);
    if (c == 0) continue;
    std::size_t j = i;
    while (j > 0 && ccc_of(s[j - 1]) > c) {
      std::swap(s[j - 1], s[j]);
      --j;
    }
  }
}

std::u32string compose(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::ptrdiff_t last_starter = -1;
  int prev_ccc = -1;  // ccc of the last char after the starter; -1 = none
  for (char32_t cp : s) {
    int c = ccc_of(cp);
    if (last_starter >= 0 && prev_ccc < c) {
      if (char32_t comp = composite_of(out[last_starter], cp)) {
        out[last_starter] = comp;
        continue;
      }
    }
    if (c == 0) {
      last_starter = static_cast<std::ptrdiff_t>(out.size());
      prev_ccc = -1;
    } else {
      prev_ccc = c;
    }
    out.push_back(cp);
  }
  return out;
}

struct DecodedChar {
  char32_t cp;
  int len;
  bool valid;
};

// Strict UTF-8: rejects overlong forms, surrogates and values past U+10FFFF.
DecodedChar next_codepoint(std::string_view text, std::size_t pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(text[i]);
  };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1, true};
  int len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return {b0, 1, false};
  }
  if (pos + len > text.size()) return {b0, 1, false};
  for (int i = 1; i < len; ++i) {
    unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    return {b0, 1, false};
  return {cp, len, true};
}

bool is_neutral_whitespace(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x00A0:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

CharClass fallback_class(char32_t cp) {
  if (is_neutral_whitespace(cp)) return {std::nullopt, TokenKind::Whitespace};
  if (cp >= U'0' && cp <= U'9') return {std::nullopt, TokenKind::Digit};
  if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
      (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E) ||
      (cp >= 0x2010 && cp <= 0x2027))
    return {std::nullopt, TokenKind::Punctuation};
  return {std::nullopt, TokenKind::Other};
}

struct NameTable {
  std::string_view name;
  Script script;
};
constexpr NameTable kScriptNames[] = {
    {"DEVANAGARI", Script::Devanagari}, {"BENGALI", Script::Bengali},
    {"GUJARATI", Script::Gujarati},     {"KANNADA", Script::Kannada},
    {"MALAYALAM", Script::Malayalam},   {"ODIA", Script::Odia},
    {"GURMUKHI", Script::Gurmukhi},     {"TAMIL", Script::Tamil},
    {"TELUGU", Script::Telugu},         {"PERSOARABIC", Script::PersoArabic},
    {"PUNJABI", Script::Gurmukhi},      {"URDU", Script::PersoArabic},
};

constexpr std::string_view kKindNames[] = {
    "LETTER", "MATRA",      "VIRAMA", "DIGIT",
    "PUNCTUATION", "WHITESPACE", "OTHER",
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

}  // namespace

const std::array<Script, kScriptCount>& all_scripts() {
  static const std::array<Script, kScriptCount> order = {
      Script::Devanagari, Script::Bengali,  Script::Gujarati,
      Script::Kannada,    Script::Malayalam, Script::Odia,
      Script::Gurmukhi,   Script::Tamil,    Script::Telugu,
      Script::PersoArabic};
  return order;
}

std::string_view script_name(Script script) {
  return kScriptNames[static_cast<int>(script)].name;
}

std::optional<Script> parse_script(std::string_view name) {
  std::string u = upper(name);
  for (const auto& entry : kScriptNames)
    if (entry.name == u) return entry.script;
  return std::nullopt;
}

std::string_view token_kind_name(TokenKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

const ClassificationTable& ClassificationTable::builtin() {
  static const ClassificationTable table = [] {
    ClassificationTable t;
    t.rows_.reserve(std::size(kClassificationRows));
    for (const auto& row : kClassificationRows)
      t.rows_.push_back({row.cp, {to_script(row.script), row.kind}});
    return t;
  }();
  return table;
}

ClassificationTable ClassificationTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open classification table: " + path);
  ClassificationTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string hex, script, kind;
    if (!std::getline(fields, hex, '\t') ||
        !std::getline(fields, script, '\t') || !std::getline(fields, kind))
      throw format_error("expected CODEPOINT-HEX\\tSCRIPT\\tKIND at line " +
                         std::to_string(lineno), path);
    char32_t cp = 0;
    try {
      cp = static_cast<char32_t>(std::stoul(hex, nullptr, 16));
    } catch (const std::exception&) {
      throw format_error("bad codepoint '" + hex + "' at line " +
                         std::to_string(lineno), path);
    }
    CharClass cls;
    if (script != "COMMON") {
      auto s = parse_script(script);
      if (!s)
        throw format_error("unknown script '" + script + "' at line " +
                           std::to_string(lineno), path);
      cls.script = *s;
    }
    std::string ukind = upper(kind);
    bool found = false;
    for (int i = 0; i < static_cast<int>(std::size(kKindNames)); ++i) {
      if (kKindNames[i] == ukind) {
        cls.kind = static_cast<TokenKind>(i);
        found = true;
        break;
      }
    }
    if (!found)
      throw format_error("unknown kind '" + kind + "' at line " +
                         std::to_string(lineno), path);
    t.rows_.push_back({cp, cls});
  }
  std::sort(t.rows_.begin(), t.rows_.end(),
            [](const Row& a, const Row& b) { return a.cp < b.cp; });
  return t;
}

CharClass ClassificationTable::classify(char32_t cp) const {
  auto it = std::lower_bound(
      rows_.begin(), rows_.end(), cp,
      [](const Row& row, char32_t value) { return row.cp < value; });
  if (it != rows_.end() && it->cp == cp) return it->cls;
  return fallback_class(cp);
}

bool ClassificationTable::same_rows(const ClassificationTable& other) const {
  if (rows_.size() != other.rows_.size()) return false;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].cp != other.rows_[i].cp ||
        rows_[i].cls.script != other.rows_[i].cls.script ||
        rows_[i].cls.kind != other.rows_[i].cls.kind)
      return false;
  }
  return true;
}

std::optional<std::u32string> decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    DecodedChar d = next_codepoint(text, pos);
    if (!d.valid) return std::nullopt;
    out.push_back(d.cp);
    pos += d.len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::string normalize_nfc(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::u32string run;  // decoded, pending normalization
  const auto flush = [&] {
    if (run.empty()) return;
    canonical_order(run);
    std::u32string composed = compose(run);
    for (char32_t cp : composed) append_utf8(out, cp);
    run.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    DecodedChar d = next_codepoint(text, pos);
    if (!d.valid) {
      // Opaque byte: emit as-is, never reordered or composed across it.
      flush();
      out.push_back(text[pos]);
      pos += 1;
      continue;
    }
    decompose_into(d.cp, run);
    pos += d.len;
  }
  flush();
  return out;
}

std::optional<Script> detect_script(std::string_view text,
                                    const ClassificationTable& table) {
  std::array<std::size_t, kScriptCount> counts{};
  std::size_t pos = 0;
  while (pos < text.size()) {
    DecodedChar d = next_codepoint(text, pos);
    pos += d.len;
    if (!d.valid) continue;
    CharClass cls = table.classify(d.cp);
    if (cls.script) ++counts[static_cast<int>(*cls.script)];
  }
  std::size_t best = 0;
  int best_idx = -1;
  for (int i = 0; i < kScriptCount; ++i) {
    if (counts[i] > best) {
      best = counts[i];
      best_idx = i;
    }
  }
  if (best_idx < 0) return std::nullopt;
  return static_cast<Script>(best_idx);
}

std::vector<SourceToken> segment(std::string_view text, Script script,
                                 const ClassificationTable& table) {
  std::vector<SourceToken> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    DecodedChar d = next_codepoint(text, pos);
    std::size_t begin = pos;
    pos += d.len;
    if (!d.valid) {
      tokens.push_back({std::string(text.substr(begin, 1)), std::nullopt,
                        begin, pos, TokenKind::Other});
      continue;
    }
    CharClass cls = table.classify(d.cp);
    TokenKind kind = cls.kind;
    if (cls.script && *cls.script != script) kind = TokenKind::Other;
    // Perso-Arabic combining marks ride on their base letter.
    if (script == Script::PersoArabic && kind == TokenKind::Matra &&
        cls.script == Script::PersoArabic && !tokens.empty()) {
      SourceToken& prev = tokens.back();
      if (prev.kind == TokenKind::Letter &&
          prev.script == Script::PersoArabic && prev.end == begin) {
        prev.text.append(text.substr(begin, d.len));
        prev.end = pos;
        continue;
      }
    }
    tokens.push_back({std::string(text.substr(begin, d.len)), cls.script,
                      begin, pos, kind});
  }
  return tokens;
}

}  // namespace bharti
