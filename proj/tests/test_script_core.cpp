#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "bharti/errors.hpp"
#include "bharti/script_core.hpp"
#include "test_util.hpp"

using namespace bharti;

TEST_CASE("detect_script examples") {
  CHECK(detect_script("कमल") == Script::Devanagari);
  CHECK(!detect_script("123 !?").has_value());
  CHECK(detect_script("ಕನ್ನಡ text") == Script::Kannada);
  CHECK(!detect_script("").has_value());
  // tie breaks in enumeration order
  CHECK(detect_script("कக") == Script::Devanagari);
  CHECK(detect_script("கக क") == Script::Tamil);
  CHECK(detect_script("اردو") == Script::PersoArabic);
}

TEST_CASE("danda is script-neutral") {
  auto cls = ClassificationTable::builtin().classify(U'।');
  CHECK(!cls.script.has_value());
  CHECK(cls.kind == TokenKind::Punctuation);
  // so it never votes during detection
  CHECK(!detect_script("।।").has_value());
}

TEST_CASE("segment basic examples") {
  auto empty = segment("", Script::Devanagari);
  CHECK(empty.empty());

  auto kii = segment("की", Script::Devanagari);
  REQUIRE(kii.size() == 2);
  CHECK(kii[0].text == "क");
  CHECK(kii[0].kind == TokenKind::Letter);
  CHECK(kii[1].text == "ी");
  CHECK(kii[1].kind == TokenKind::Matra);

  auto kta = segment("क्त", Script::Devanagari);
  REQUIRE(kta.size() == 3);
  CHECK(kta[0].kind == TokenKind::Letter);
  CHECK(kta[1].kind == TokenKind::Virama);
  CHECK(kta[1].text == "्");
  CHECK(kta[2].kind == TokenKind::Letter);
}

TEST_CASE("segment assigns spans that tile the input") {
  std::string text = "कमल की १२ kahani!";
  auto tokens = segment(text, Script::Devanagari);
  std::size_t pos = 0;
  std::string rebuilt;
  for (const auto& token : tokens) {
    CHECK(token.begin == pos);
    CHECK(token.end > token.begin);
    pos = token.end;
    rebuilt += token.text;
  }
  CHECK(pos == text.size());
  CHECK(rebuilt == text);
}

TEST_CASE("foreign-script tokens become Other") {
  auto tokens = segment("कಕ", Script::Devanagari);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].kind == TokenKind::Letter);
  CHECK(tokens[1].kind == TokenKind::Other);
  CHECK(tokens[1].script == Script::Kannada);
}

TEST_CASE("perso-arabic combining marks attach to their base") {
  // beh + fatha + alef
  std::string text = "بَا";
  auto tokens = segment(text, Script::PersoArabic);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].text == "بَ");
  CHECK(tokens[0].kind == TokenKind::Letter);
  CHECK(tokens[1].text == "ا");
  // a mark with no base stays its own token
  auto lone = segment("َ", Script::PersoArabic);
  REQUIRE(lone.size() == 1);
  CHECK(lone[0].kind == TokenKind::Matra);
  // marks do not attach when another script is being segmented
  auto brahmic = segment("क़", Script::Devanagari);
  CHECK(brahmic.size() == 2);
}

TEST_CASE("segmentation round-trip fuzz with invalid bytes") {
  std::mt19937_64 rng(2024);
  const std::array<std::pair<char32_t, char32_t>, 11> blocks = {{
      {0x0900, 0x097F}, {0x0980, 0x09FF}, {0x0A00, 0x0A7F},
      {0x0A80, 0x0AFF}, {0x0B00, 0x0B7F}, {0x0B80, 0x0BFF},
      {0x0C00, 0x0C7F}, {0x0C80, 0x0CFF}, {0x0D00, 0x0D7F},
      {0x0600, 0x06FF}, {0x0020, 0x007E},
  }};
  for (int iter = 0; iter < 1000; ++iter) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      if (rng() % 10 == 0) {
        text.push_back(static_cast<char>(0x80 + rng() % 0x40));  // stray byte
        continue;
      }
      auto [lo, hi] = blocks[rng() % blocks.size()];
      append_utf8(text, lo + static_cast<char32_t>(rng() % (hi - lo + 1)));
    }
    Script script = static_cast<Script>(rng() % kScriptCount);
    auto tokens = segment(text, script);
    std::string rebuilt;
    for (const auto& token : tokens) rebuilt += token.text;
    REQUIRE(rebuilt == text);
  }
}

TEST_CASE("classification is total and deterministic") {
  const auto& table = ClassificationTable::builtin();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    char32_t cp = static_cast<char32_t>(rng() % 0x110000);
    CharClass a = table.classify(cp);
    CharClass b = table.classify(cp);
    CHECK(a.kind == b.kind);
    CHECK(a.script == b.script);
    CHECK(static_cast<int>(a.kind) >= 0);
    CHECK(static_cast<int>(a.kind) <= 6);
  }
  CHECK(table.classify(U' ').kind == TokenKind::Whitespace);
  CHECK(table.classify(U'7').kind == TokenKind::Digit);
  CHECK(table.classify(U'!').kind == TokenKind::Punctuation);
  CHECK(table.classify(U'०').kind == TokenKind::Digit);
  CHECK(table.classify(U'्').kind == TokenKind::Virama);
}

TEST_CASE("bundled classification file matches the compiled table") {
  auto from_file =
      ClassificationTable::from_file(testutil::data_path("classification.tsv"));
  CHECK(from_file.same_rows(ClassificationTable::builtin()));
  CHECK(from_file.size() > 1500);
}

TEST_CASE("classification file parse errors") {
  std::string bad = testutil::temp_path("class_bad") + ".tsv";
  testutil::write_file(bad, "0915\tNOSCRIPT\tLETTER\n");
  CHECK_THROWS_AS(ClassificationTable::from_file(bad), format_error);
  testutil::write_file(bad, "0915\tDEVANAGARI\tNOKIND\n");
  CHECK_THROWS_AS(ClassificationTable::from_file(bad), format_error);
  testutil::write_file(bad, "zz\tDEVANAGARI\tLETTER\n");
  CHECK_THROWS_AS(ClassificationTable::from_file(bad), format_error);
}

TEST_CASE("nfc matches the recorded oracle cases") {
  std::ifstream in(testutil::golden_path("nfc_cases.tsv"));
  REQUIRE(in.good());
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    auto parse_hex = [](const std::string& field) {
      std::u32string out;
      std::istringstream words(field);
      std::string word;
      while (words >> word)
        out.push_back(static_cast<char32_t>(std::stoul(word, nullptr, 16)));
      return out;
    };
    std::string input = encode_utf8(parse_hex(line.substr(0, tab)));
    std::string expected = encode_utf8(parse_hex(line.substr(tab + 1)));
    REQUIRE(normalize_nfc(input) == expected);
    ++cases;
  }
  CHECK(cases > 1000);
}

TEST_CASE("nfc leaves unsupported codepoints alone") {
  CHECK(normalize_nfc("plain ascii") == "plain ascii");
  CHECK(normalize_nfc("") == "");
  std::string mixed = "क\xFFम";  // stray byte passes through
  CHECK(normalize_nfc(mixed) == mixed);
}

TEST_CASE("script names parse and print") {
  for (Script s : all_scripts()) {
    auto parsed = parse_script(script_name(s));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == s);
  }
  CHECK(parse_script("punjabi") == Script::Gurmukhi);
  CHECK(parse_script("urdu") == Script::PersoArabic);
  CHECK(parse_script("Devanagari") == Script::Devanagari);
  CHECK(!parse_script("klingon").has_value());
}

TEST_CASE("decode_utf8 rejects malformed input") {
  CHECK(!decode_utf8("\xC0\xAF").has_value());   // overlong
  CHECK(!decode_utf8("\xED\xA0\x80").has_value());  // surrogate
  CHECK(!decode_utf8("\xF5\x80\x80\x80").has_value());
  CHECK(decode_utf8("कमल").has_value());
  auto cps = decode_utf8("क");
  REQUIRE(cps.has_value());
  CHECK((*cps)[0] == 0x915);
}
