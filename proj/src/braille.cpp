#include "bharti/braille.hpp"

#include <array>
#include <fstream>

#include "bharti/errors.hpp"
#include "bharti/script_core.hpp"

namespace bharti {
namespace {

// Indexed by dot mask; matches data/braille_ascii.tsv.
constexpr char kBrailleAscii[65] =
    " A1B'K2L@CIF/MSP\"E3H9O6R^DJG>NTQ,*5<-U8V.%[$+X!&;:4\\0Z7(_?W]#Y)=";

}  // namespace

BrailleCell BrailleCell::from_dots(std::initializer_list<int> dots) {
  uint8_t mask = 0;
  for (int d : dots)
    if (d >= 1 && d <= 6) mask |= static_cast<uint8_t>(1u << (d - 1));
  return BrailleCell(mask);
}

const BrailleAsciiTable& BrailleAsciiTable::builtin() {
  static const BrailleAsciiTable table = [] {
    BrailleAsciiTable t;
    for (int i = 0; i < 64; ++i) t.chars_[i] = kBrailleAscii[i];
    return t;
  }();
  return table;
}

BrailleAsciiTable BrailleAsciiTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open braille ascii table: " + path);
  BrailleAsciiTable t;
  std::array<bool, 64> seen{};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.size() != tab + 2)
      throw format_error("expected MASK-HEX\\tASCII-CHAR at line " +
                         std::to_string(lineno), path);
    unsigned long mask = 0;
    try {
      mask = std::stoul(line.substr(0, tab), nullptr, 16);
    } catch (const std::exception&) {
      throw format_error("bad mask at line " + std::to_string(lineno), path);
    }
    if (mask > 63)
      throw format_error("mask out of range at line " + std::to_string(lineno),
                         path);
    t.chars_[mask] = line[tab + 1];
    seen[mask] = true;
  }
  for (int i = 0; i < 64; ++i)
    if (!seen[i])
      throw format_error("missing entry for mask " + std::to_string(i), path);
  return t;
}

std::string to_unicode(const BrailleSequence& seq) {
  std::string out;
  out.reserve(seq.size() * 3);
  for (BrailleCell cell : seq)
    append_utf8(out, 0x2800 + static_cast<char32_t>(cell.mask()));
  return out;
}

BrailleSequence from_unicode(std::string_view text) {
  auto cps = decode_utf8(text);
  if (!cps) throw format_error("invalid UTF-8 in braille text");
  BrailleSequence seq;
  seq.reserve(cps->size());
  for (char32_t cp : *cps) {
    if (cp < 0x2800 || cp > 0x283F)
      throw format_error("not a 6-dot braille pattern: U+" +
                         std::to_string(static_cast<unsigned>(cp)));
    seq.push_back(BrailleCell(static_cast<uint8_t>(cp - 0x2800)));
  }
  return seq;
}

std::string to_brf(const BrailleSequence& seq, const BrailleAsciiTable& table) {
  std::string out;
  out.reserve(seq.size());
  for (BrailleCell cell : seq) out.push_back(table.at(cell.mask()));
  return out;
}

std::string to_dot_notation(const BrailleSequence& seq) {
  std::string out;
  bool first = true;
  for (BrailleCell cell : seq) {
    if (!first) out.push_back('-');
    first = false;
    if (cell.blank()) {
      out.push_back('0');
      continue;
    }
    for (int d = 1; d <= 6; ++d)
      if (cell.has_dot(d)) out.push_back(static_cast<char>('0' + d));
  }
  return out;
}

BrailleSequence parse_dot_notation(std::string_view text) {
  BrailleSequence seq;
  if (text.empty()) return seq;
  std::size_t pos = 0;
  while (true) {
    auto dash = text.find('-', pos);
    std::string_view cell = text.substr(
        pos, dash == std::string_view::npos ? std::string_view::npos
                                            : dash - pos);
    if (cell.empty()) throw format_error("empty cell in dot notation");
    if (cell == "0") {
      seq.push_back(BrailleCell());
    } else {
      uint8_t mask = 0;
      int prev = 0;
      for (char c : cell) {
        if (c < '1' || c > '6')
          throw format_error(std::string("dot out of range: '") + c + "'");
        int d = c - '0';
        if (d <= prev)
          throw format_error("dots must be ascending without repeats");
        prev = d;
        mask |= static_cast<uint8_t>(1u << (d - 1));
      }
      seq.push_back(BrailleCell(mask));
    }
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return seq;
}

}  // namespace bharti
