"""Smoke tests for the python extension module."""

import os
from pathlib import Path

import pytest

import bhartibraille as bb


def data_dir() -> Path:
    return bb.data_dir()


@pytest.fixture(scope="module")
def devanagari():
    base = data_dir() / "tables"
    return bb.RuleTable.load([str(base / "devanagari.tsv"),
                              str(base / "common.tsv")])


def test_translate_basic(devanagari):
    result = bb.translate("कमल", devanagari)
    assert result.unicode == "⠅⠍⠇"
    assert result.dots == "13-134-123"
    assert result.brf == "KML"
    assert result.cells == [0x05, 0x0D, 0x07]
    assert result.untranslated == []


def test_detect_and_segment():
    assert bb.detect_script("कमल") == bb.Script.DEVANAGARI
    assert bb.detect_script("ಕನ್ನಡ text") == bb.Script.KANNADA
    assert bb.detect_script("123") is None
    tokens = bb.segment("की", bb.Script.DEVANAGARI)
    assert [t.text for t in tokens] == ["क", "ी"]
    assert tokens[0].kind == bb.TokenKind.LETTER
    assert tokens[1].kind == bb.TokenKind.MATRA


def test_renderers_round_trip():
    masks = [0, 5, 63, 21]
    assert bb.parse_dots(bb.to_dots(masks)) == masks
    assert len(bb.to_brf(masks)) == len(masks)
    assert bb.to_unicode([0x05]) == "⠅"


def test_normalize_nfc():
    # composition-excluded QA decomposes to ka + nukta
    assert bb.normalize_nfc("क़") == "क़"


def test_missing_model_raises(devanagari):
    with pytest.raises(bb.MissingModelError):
        bb.translate("कं", devanagari)
    # rule-only resolution needs no model
    result = bb.translate("कं", devanagari, rule_only=True)
    assert result.cells == [0x05, 0x30]


def test_train_and_disambiguate(tmp_path, devanagari):
    gold = tmp_path / "gold.tsv"
    tagged = tmp_path / "tagged.tsv"
    pairs, sites = bb.generate_corpus(
        devanagari, bb.Script.DEVANAGARI, count=80, inject=0.12, seed=5,
        gold_out=str(gold), tagged_out=str(tagged))
    assert pairs == 80
    assert sites > 0

    model, trace = bb.train(str(tagged), devanagari, epochs=25,
                            embed_dim=24, hidden_dim=32, seed=3)
    assert trace[-1] < trace[0]

    rows, text = bb.evaluate(str(gold), devanagari, model)
    assert rows[0]["script"] == "DEVANAGARI"
    assert rows[0]["lstm"] >= 0.99
    assert rows[0]["rule_based"] < 1.0
    assert "Rule Based" in text

    out = tmp_path / "model.bbt"
    model.save(str(out))
    loaded = bb.TaggerModel.load(str(out))
    assert loaded.tags == model.tags
    hybrid = bb.translate("कमलं", devanagari, loaded)
    assert hybrid.model_sites == 1


def test_table_error_maps_to_python(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("DEVANAGARI\tक\t78\n", encoding="utf-8")
    with pytest.raises(bb.TableError):
        bb.RuleTable.load([str(bad)])
