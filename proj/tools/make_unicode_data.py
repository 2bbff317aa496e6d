#!/usr/bin/env python3
"""Regenerates the bundled Unicode data used by the segmenter.

Outputs (all committed to the repo):
  data/classification.tsv   codepoint classification table (public contract)
  src/unicode_data.inc      embedded copy of the same data plus the NFC
                            decomposition/combining-class/composition tables
  tests/golden/nfc_cases.tsv  NFC oracle cases produced by unicodedata

Run from the repo root:  python3 tools/make_unicode_data.py
"""

import random
import sys
import unicodedata
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

# Script blocks. PersoArabic spans the Arabic block plus both presentation
# form blocks so Urdu text in any storage convention is recognized.
BLOCKS = [
    ("DEVANAGARI", [(0x0900, 0x097F)]),
    ("BENGALI", [(0x0980, 0x09FF)]),
    ("GUJARATI", [(0x0A80, 0x0AFF)]),
    ("KANNADA", [(0x0C80, 0x0CFF)]),
    ("MALAYALAM", [(0x0D00, 0x0D7F)]),
    ("ODIA", [(0x0B00, 0x0B7F)]),
    ("GURMUKHI", [(0x0A00, 0x0A7F)]),
    ("TAMIL", [(0x0B80, 0x0BFF)]),
    ("TELUGU", [(0x0C00, 0x0C7F)]),
    ("PERSOARABIC", [(0x0600, 0x06FF), (0xFB50, 0xFDFF), (0xFE70, 0xFEFF)]),
]

# Danda and double danda live in the Devanagari block but punctuate all
# Brahmic scripts, so they are classified as COMMON (script-neutral).
COMMON_OVERRIDES = {0x0964, 0x0965}


def classify(cp: int) -> str:
    name = unicodedata.name(chr(cp), "")
    cat = unicodedata.category(chr(cp))
    if "VIRAMA" in name:
        return "VIRAMA"
    if cat in ("Nd", "No"):
        return "DIGIT"
    if cat in ("Mn", "Mc", "Me"):
        return "MATRA"
    if cat in ("Lo", "Lm"):
        return "LETTER"
    if cat.startswith("P"):
        return "PUNCTUATION"
    if cat == "Zs":
        return "WHITESPACE"
    return "OTHER"


def assigned(cp: int) -> bool:
    return unicodedata.category(chr(cp)) != "Cn"


def gather_classification():
    rows = []
    for script, ranges in BLOCKS:
        for lo, hi in ranges:
            for cp in range(lo, hi + 1):
                if not assigned(cp):
                    continue
                s = "COMMON" if cp in COMMON_OVERRIDES else script
                rows.append((cp, s, classify(cp)))
    rows.sort()
    return rows


def in_scope(cp: int) -> bool:
    for _, ranges in BLOCKS:
        for lo, hi in ranges:
            if lo <= cp <= hi:
                return True
    return False


def canonical_decomposition(cp: int):
    d = unicodedata.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    return [int(f, 16) for f in d.split()]


def gather_nfc_tables():
    decomp = {}
    ccc = {}
    comp = []
    scope = set()
    for _, ranges in BLOCKS:
        for lo, hi in ranges:
            scope.update(range(lo, hi + 1))
    # pull in decomposition targets so recursion closes
    pending = [cp for cp in sorted(scope) if assigned(cp)]
    seen = set(pending)
    while pending:
        cp = pending.pop()
        d = canonical_decomposition(cp)
        if d:
            decomp[cp] = d
            for t in d:
                if t not in seen:
                    seen.add(t)
                    pending.append(t)
    for cp in sorted(seen):
        if not assigned(cp):
            continue
        c = unicodedata.combining(chr(cp))
        if c:
            ccc[cp] = c
    # primary composites: pairs whose NFC recomposes to the composite
    for cp, d in sorted(decomp.items()):
        if len(d) == 2:
            if unicodedata.normalize("NFC", "".join(map(chr, d))) == chr(cp):
                comp.append((d[0], d[1], cp))
    return decomp, ccc, comp


def write_classification(rows):
    out = ROOT / "data" / "classification.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="\n") as f:
        f.write("# Codepoint classification table: CODEPOINT-HEX\tSCRIPT\tKIND\n")
        f.write("# Regenerate with tools/make_unicode_data.py\n")
        for cp, script, kind in rows:
            f.write(f"{cp:04X}\t{script}\t{kind}\n")
    return out


def write_inc(rows, decomp, ccc, comp):
    out = ROOT / "src" / "unicode_data.inc"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="\n") as f:
        f.write("// Generated by tools/make_unicode_data.py. Do not edit.\n")
        f.write("// Mirrors data/classification.tsv plus the NFC tables for the\n")
        f.write("// supported blocks.\n\n")
        f.write("inline constexpr ClassificationRow kClassificationRows[] = {\n")
        for cp, script, kind in rows:
            f.write(f"    {{0x{cp:04X}, Script_::{script.title()}, TokenKind::{kind.title()}}},\n")
        f.write("};\n\n")
        f.write("inline constexpr DecompositionRow kDecompositionRows[] = {\n")
        for cp in sorted(decomp):
            d = decomp[cp]
            b = d[1] if len(d) == 2 else 0
            f.write(f"    {{0x{cp:04X}, 0x{d[0]:04X}, 0x{b:04X}}},\n")
        f.write("};\n\n")
        f.write("inline constexpr CombiningClassRow kCombiningClassRows[] = {\n")
        for cp in sorted(ccc):
            f.write(f"    {{0x{cp:04X}, {ccc[cp]}}},\n")
        f.write("};\n\n")
        f.write("inline constexpr CompositionRow kCompositionRows[] = {\n")
        for a, b, c in sorted(comp):
            f.write(f"    {{0x{a:04X}, 0x{b:04X}, 0x{c:04X}}},\n")
        f.write("};\n")
    return out


def write_nfc_cases(decomp, comp):
    out = ROOT / "tests" / "golden" / "nfc_cases.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240517)
    pools = []
    for _, ranges in BLOCKS:
        block = []
        for lo, hi in ranges:
            block.extend(cp for cp in range(lo, hi + 1) if assigned(cp))
        pools.append(block)
    parts = set()
    for d in decomp.values():
        parts.update(d)
    parts = sorted(parts)
    cases = []
    for _ in range(1500):
        pool = rng.choice(pools)
        n = rng.randint(1, 8)
        cps = []
        for _ in range(n):
            r = rng.random()
            if r < 0.25 and comp:
                a, b, _ = rng.choice(comp)
                cps.extend([a, b])
            elif r < 0.45 and parts:
                cps.append(rng.choice(parts))
            elif r < 0.55 and decomp:
                cps.append(rng.choice(sorted(decomp)))
            else:
                cps.append(rng.choice(pool))
        s = "".join(map(chr, cps))
        cases.append(s)
    # a few fixed shapes: composed, decomposed, reordering of marks
    cases.append("क़्")  # virama(9) + nukta(7) must reorder
    cases.append("ো")        # composes to U+09CB
    cases.append("آ")        # composes to U+0622
    cases.append("क़")              # composition-excluded, decomposes
    with out.open("w", encoding="utf-8", newline="\n") as f:
        f.write("# INPUT-HEX\tNFC-HEX  (space-joined codepoints)\n")
        for s in cases:
            nfc = unicodedata.normalize("NFC", s)
            f.write(" ".join(f"{ord(c):04X}" for c in s))
            f.write("\t")
            f.write(" ".join(f"{ord(c):04X}" for c in nfc))
            f.write("\n")
    return out


def main():
    rows = gather_classification()
    decomp, ccc, comp = gather_nfc_tables()
    paths = [
        write_classification(rows),
        write_inc(rows, decomp, ccc, comp),
        write_nfc_cases(decomp, comp),
    ]
    for p in paths:
        print(f"wrote {p.relative_to(ROOT)}")
    print(f"{len(rows)} classification rows, {len(decomp)} decompositions, "
          f"{len(ccc)} combining classes, {len(comp)} composition pairs")


if __name__ == "__main__":
    sys.exit(main())
