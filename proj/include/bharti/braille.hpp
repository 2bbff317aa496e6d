#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace bharti {

// One 6-dot cell. Bit i-1 set <=> dot i raised; dots 1,2,3 run down the
// left column and 4,5,6 down the right. Mask 0 is the blank cell.
class BrailleCell {
 public:
  constexpr BrailleCell() = default;
  constexpr explicit BrailleCell(uint8_t mask) : mask_(mask & 0x3F) {}
  static BrailleCell from_dots(std::initializer_list<int> dots);

  constexpr uint8_t mask() const { return mask_; }
  constexpr bool blank() const { return mask_ == 0; }
  constexpr bool has_dot(int dot) const {
    return dot >= 1 && dot <= 6 && (mask_ >> (dot - 1)) & 1;
  }
  friend constexpr auto operator<=>(BrailleCell, BrailleCell) = default;

 private:
  uint8_t mask_ = 0;
};

using BrailleSequence = std::vector<BrailleCell>;

// The 64-entry North American Braille ASCII table. The bundled content is
// compiled in and also ships as data/braille_ascii.tsv
// (64 lines "MASK-HEX\tASCII-CHAR").
class BrailleAsciiTable {
 public:
  static const BrailleAsciiTable& builtin();
  static BrailleAsciiTable from_file(const std::string& path);

  char at(uint8_t mask) const { return chars_[mask & 0x3F]; }
  bool operator==(const BrailleAsciiTable&) const = default;

 private:
  std::array<char, 64> chars_{};
};

// Unicode Braille Patterns: cell -> U+2800 + mask.
std::string to_unicode(const BrailleSequence& seq);
// Inverse of to_unicode; throws format_error on non-braille codepoints.
BrailleSequence from_unicode(std::string_view text);

// Braille ASCII (BRF): one character per cell.
std::string to_brf(const BrailleSequence& seq,
                   const BrailleAsciiTable& table = BrailleAsciiTable::builtin());

// Dot numbers: "13-2" for {1,3},{2}; blank cell is "0"; empty sequence "".
std::string to_dot_notation(const BrailleSequence& seq);
// Inverse of to_dot_notation; throws format_error on malformed input.
BrailleSequence parse_dot_notation(std::string_view text);

}  // namespace bharti
