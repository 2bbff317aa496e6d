"""Indic text to Bharati braille translation.

The heavy lifting lives in the C++ extension module; this package re-exports
its surface and adds a small helper for locating the bundled data files.
"""

import os
from pathlib import Path

from ._core import (  # noqa: F401
    CorpusError,
    DetectionError,
    DivergenceError,
    FormatError,
    MissingModelError,
    RuleTable,
    Script,
    SourceToken,
    TableError,
    TaggerModel,
    TokenKind,
    TranslationResult,
    __version__,
    detect_script,
    evaluate,
    generate_corpus,
    normalize_nfc,
    parse_dots,
    segment,
    to_brf,
    to_dots,
    to_unicode,
    train,
    translate,
)


def data_dir() -> Path:
    """Directory holding the bundled tables (override with BHARTI_DATA)."""
    env = os.environ.get("BHARTI_DATA")
    if env:
        return Path(env)
    packaged = Path(__file__).parent / "data"
    if packaged.is_dir():
        return packaged
    return Path(__file__).resolve().parents[2] / "data"


def load_tables(*names: str) -> RuleTable:
    """Loads bundled tables by stem, e.g. load_tables("devanagari", "common")."""
    base = data_dir() / "tables"
    return RuleTable.load([str(base / f"{name}.tsv") for name in names])
