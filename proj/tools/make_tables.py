#!/usr/bin/env python3
"""Regenerates the bundled Bharati braille mapping tables.

One phoneme-to-dots chart drives all ten scripts: each script's codepoints
are resolved to chart entries through their Unicode character names, so
phonetically equivalent letters share one cell across scripts, which is the
defining property of Bharati braille. Output is one TSV per script plus
common.tsv (script-neutral digits and punctuation) under data/tables/.

Run from the repo root:  python3 tools/make_tables.py
"""

import sys
import unicodedata
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "tables"

BRAHMIC = {
    "DEVANAGARI": (0x0900, 0x097F),
    "BENGALI": (0x0980, 0x09FF),
    "GUJARATI": (0x0A80, 0x0AFF),
    "KANNADA": (0x0C80, 0x0CFF),
    "MALAYALAM": (0x0D00, 0x0D7F),
    "ODIA": (0x0B00, 0x0B7F),
    "GURMUKHI": (0x0A00, 0x0A7F),
    "TAMIL": (0x0B80, 0x0BFF),
    "TELUGU": (0x0C00, 0x0C7F),
}

# Scripts with a short/long e and o distinction; elsewhere E/EE and O/OO
# both mean the long vowel.
SOUTHERN = {"KANNADA", "MALAYALAM", "TAMIL", "TELUGU"}

CONSONANTS = {
    "KA": "13", "KHA": "46", "GA": "1245", "GHA": "126", "NGA": "346",
    "CA": "14", "CHA": "16", "JA": "245", "JHA": "356", "NYA": "25",
    "TTA": "23456", "TTHA": "2456", "DDA": "1246", "DDHA": "123456",
    "NNA": "3456",
    "TA": "2345", "THA": "1456", "DA": "145", "DHA": "2346", "NA": "1345",
    "PA": "1234", "PHA": "235", "BA": "12", "BHA": "45", "MA": "134",
    "YA": "13456", "RA": "1235", "LA": "123", "VA": "1236",
    "SHA": "146", "SSA": "12346", "SA": "234", "HA": "125",
    "LLA": "456", "LLLA": "12456", "RRA": "12345", "NNNA": "2456",
}

VOWELS_LONG = {"E": "15", "EE": "15", "AI": "34", "O": "135", "OO": "135",
               "AU": "246"}
VOWELS_SHORT = {"E": "26", "EE": "15", "AI": "34", "O": "1346", "OO": "135",
                "AU": "246"}
VOWELS = {
    "A": "1", "AA": "345", "I": "24", "II": "35", "U": "136", "UU": "1256",
    "VOCALIC R": "5-1235", "VOCALIC RR": "6-1235",
    "VOCALIC L": "5-123", "VOCALIC LL": "6-123",
}

# Nukta digraphs with dedicated cells; everything else written with a nukta
# falls back to the base letter via the nukta deletion rule.
NUKTA_DIGRAPHS = {
    "DEVANAGARI": {"क": "12345", "ख": "12456", "ग": "2356", "ज": "1356",
                   "फ": "124"},
    "GURMUKHI": {"ਖ": "12456", "ਗ": "2356", "ਜ": "1356", "ਫ": "124"},
    "BENGALI": {"জ": "1356"},
}

DIGIT_CELLS = ["245", "1", "12", "14", "145", "15", "124", "1245", "125",
               "24"]  # 0..9

# Kannada U+0CDE carries the historic name FA but is the letter LLLA.
NAME_OVERRIDES = {0x0CDE: ("LETTER", "LLLA")}

NUMSIGN = "3456"

URDU_LETTERS = {
    0x0621: "3",        # hamza
    0x0622: "345",      # alef with madda
    0x0623: "3-1", 0x0625: "3-24", 0x0624: "3-1236", 0x0626: "3-13456",
    0x0627: "1",        # alef
    0x0628: "12",       # beh
    0x0629: "2345",     # teh marbuta
    0x062A: "2345",     # teh
    0x062B: "1456",     # theh
    0x062C: "245",      # jeem
    0x062D: "156",      # hah
    0x062E: "12456",    # khah
    0x062F: "145",      # dal
    0x0630: "2346",     # thal
    0x0631: "1235",     # reh
    0x0632: "1356",     # zain
    0x0633: "234",      # seen
    0x0634: "146",      # sheen
    0x0635: "12346",    # sad
    0x0636: "235",      # dad
    0x0637: "2356",     # tah
    0x0638: "123456",   # zah
    0x0639: "12356",    # ain
    0x063A: "126",      # ghain
    0x0641: "124",      # feh
    0x0642: "12345",    # qaf
    0x0643: "13", 0x06A9: "13",          # kaf, keheh
    0x0644: "123",      # lam
    0x0645: "134",      # meem
    0x0646: "1345",     # noon
    0x0647: "125", 0x06C1: "125",        # heh, heh goal
    0x06BE: "236",      # heh doachashmee
    0x0648: None,       # waw: ambiguity class below
    0x0649: "13456",    # alef maksura
    0x064A: "13456", 0x06CC: "13456",    # yeh, farsi yeh
    0x06D2: "34",       # yeh barree
    0x067E: "1234",     # peh
    0x0686: "16",       # tcheh
    0x0688: "1246",     # ddal
    0x0691: "2456",     # rreh
    0x0698: "346",      # jeh
    0x06AF: "1245",     # gaf
    0x0679: "23456",    # tteh
}

URDU_MARKS = {
    0x064E: "26",   # fatha
    0x0650: "24",   # kasra
    0x064F: "136",  # damma
    0x0652: "36",   # sukun
    0x0651: "6",    # shadda
    0x0653: "345",  # maddah above
    0x0654: "3",    # hamza above
}

URDU_PUNCT = {0x060C: "2", 0x061B: "23", 0x061F: "236", 0x06D4: "256"}

COMMON_PUNCT = {
    ".": "256", ",": "2", ";": "23", ":": "25", "?": "236", "!": "235",
    "'": "3", "-": "36", "(": "2356", ")": "2356", '"': "2356",
    "।": "256",        # danda
    "॥": "256-256",    # double danda
}


def nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


def named(cp: int):
    try:
        return unicodedata.name(chr(cp))
    except ValueError:
        return None


def brahmic_rules(script: str, lo: int, hi: int):
    rules = []   # (source, dots, tag)
    vowels = dict(VOWELS)
    vowels.update(VOWELS_SHORT if script in SOUTHERN else VOWELS_LONG)
    for cp in range(lo, hi + 1):
        name = named(cp)
        if name is None:
            continue
        if cp in NAME_OVERRIDES:
            part, key = NAME_OVERRIDES[cp]
        else:
            after = name.split(" ", 1)[1] if " " in name else ""
            if after.startswith("LETTER "):
                part, key = "LETTER", after[len("LETTER "):]
            elif after.startswith("VOWEL SIGN "):
                part, key = "SIGN", after[len("VOWEL SIGN "):]
            elif after.startswith("SIGN "):
                part, key = "MARK", after[len("SIGN "):]
            elif after.startswith("DIGIT "):
                part, key = "DIGIT", after[len("DIGIT "):]
            else:
                continue
        src = chr(cp)
        if part == "LETTER":
            dots = CONSONANTS.get(key) or vowels.get(key)
            if dots:
                rules.append((src, dots, None))
        elif part == "SIGN":
            dots = vowels.get(key)
            if dots:
                rules.append((src, dots, None))
        elif part == "DIGIT":
            words = ["ZERO", "ONE", "TWO", "THREE", "FOUR", "FIVE", "SIX",
                     "SEVEN", "EIGHT", "NINE"]
            if key in words:
                rules.append((src, DIGIT_CELLS[words.index(key)], None))
        elif part == "MARK":
            if key == "VIRAMA":
                rules.append((src, "4", "CONJ"))
                rules.append((src, "46", "HALANT"))
            elif key in ("ANUSVARA", "BINDI", "TIPPI"):
                rules.append((src, "56", "SIGN"))
                rules.append((src, "1345", "NASAL"))
            elif key in ("CANDRABINDU", "ADAK BINDI"):
                rules.append((src, "56", None))
            elif key == "VISARGA":
                rules.append((src, "6", None))
            elif key == "NUKTA":
                rules.append((src, "", None))   # absorbed into the base letter
            elif key == "AVAGRAHA":
                rules.append((src, "3", None))
            elif key == "ADDAK":
                rules.append((src, "23", None))
    # chillus are pure consonants: consonant cell plus the conjunct indicator
    if script == "MALAYALAM":
        for cp, cons in [(0x0D7A, "3456"), (0x0D7B, "1345"), (0x0D7C, "1235"),
                         (0x0D7D, "123"), (0x0D7E, "456"), (0x0D7F, "13")]:
            rules.append((chr(cp), cons + "-4", None))
    for base, dots in NUKTA_DIGRAPHS.get(script, {}).items():
        rules.append((base + "़" if script == "DEVANAGARI"
                      else base + {"GURMUKHI": "਼",
                                   "BENGALI": "়"}[script],
                      dots, None))
    return rules


def urdu_rules():
    rules = []
    for cp, dots in sorted(URDU_LETTERS.items()):
        if dots is None:
            continue
        rules.append((chr(cp), dots, None))
    rules.append((chr(0x0648), "135", "VOWEL"))
    rules.append((chr(0x0648), "1236", "CONS"))
    rules.append((chr(0x06BA), "56", "SIGN"))      # noon ghunna
    rules.append((chr(0x06BA), "1345", "NASAL"))
    for cp, dots in sorted(URDU_MARKS.items()):
        rules.append((chr(cp), dots, None))
    for cp, dots in sorted(URDU_PUNCT.items()):
        rules.append((chr(cp), dots, None))
    rules.append((chr(0x0640), "", None))          # kashida carries no sound
    for cp in list(range(0x0660, 0x066A)) + list(range(0x06F0, 0x06FA)):
        rules.append((chr(cp), DIGIT_CELLS[cp % 16], None))
    return rules


def write_table(path: Path, script: str, rules, header: str):
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(f"# {header}\n")
        f.write("# Fields: SCRIPT\tSOURCE\tDOTS[\tTAG[\tPRIORITY[\tCONTEXT]]]\n")
        f.write("# Regenerate with tools/make_tables.py\n")
        f.write(f"@NUMSIGN\t{NUMSIGN}\n")
        for source, dots, tag in rules:
            source = nfc(source)
            fields = [script, source, dots]
            if tag:
                fields.append(tag)
            f.write("\t".join(fields) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    total = 0
    for script, (lo, hi) in BRAHMIC.items():
        rules = brahmic_rules(script, lo, hi)
        write_table(OUT / f"{script.lower()}.tsv", script, rules,
                    f"{script.title()} to Bharati braille mapping")
        total += len(rules)
        print(f"{script.lower()}.tsv: {len(rules)} rules")
    rules = urdu_rules()
    write_table(OUT / "urdu.tsv", "PERSOARABIC", rules,
                "Urdu (Perso-Arabic) to Bharati braille mapping")
    total += len(rules)
    print(f"urdu.tsv: {len(rules)} rules")
    common = [(ch, dots, None) for ch, dots in
              sorted(COMMON_PUNCT.items(), key=lambda kv: ord(kv[0][0]))]
    common += [(str(d), DIGIT_CELLS[d], None) for d in range(10)]
    write_table(OUT / "common.tsv", "COMMON", common,
                "Script-neutral punctuation and ASCII digits")
    total += len(common)
    print(f"common.tsv: {len(common)} rules, total {total}")


if __name__ == "__main__":
    sys.exit(main())
