#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bharti/cli.hpp"
#include "bharti/errors.hpp"
#include "bharti/eval.hpp"
#include "bharti/translate.hpp"

namespace py = pybind11;
using namespace bharti;

namespace {

BrailleSequence cells_from_masks(const std::vector<int>& masks) {
  BrailleSequence seq;
  seq.reserve(masks.size());
  for (int m : masks) {
    if (m < 0 || m > 63) throw format_error("cell mask out of range");
    seq.push_back(BrailleCell(static_cast<uint8_t>(m)));
  }
  return seq;
}

std::vector<int> masks_from_cells(const BrailleSequence& seq) {
  std::vector<int> masks;
  masks.reserve(seq.size());
  for (BrailleCell cell : seq) masks.push_back(cell.mask());
  return masks;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Indic text to Bharati braille translation core";

  py::enum_<Script> script(m, "Script");
  for (Script s : all_scripts())
    script.value(std::string(script_name(s)).c_str(), s);

  py::enum_<TokenKind>(m, "TokenKind")
      .value("LETTER", TokenKind::Letter)
      .value("MATRA", TokenKind::Matra)
      .value("VIRAMA", TokenKind::Virama)
      .value("DIGIT", TokenKind::Digit)
      .value("PUNCTUATION", TokenKind::Punctuation)
      .value("WHITESPACE", TokenKind::Whitespace)
      .value("OTHER", TokenKind::Other);

  py::class_<SourceToken>(m, "SourceToken")
      .def_readonly("text", &SourceToken::text)
      .def_readonly("begin", &SourceToken::begin)
      .def_readonly("end", &SourceToken::end)
      .def_readonly("kind", &SourceToken::kind)
      .def_property_readonly(
          "script",
          [](const SourceToken& t) -> py::object {
            if (!t.script) return py::none();
            return py::cast(*t.script);
          })
      .def("__repr__", [](const SourceToken& t) {
        return "SourceToken(" + t.text + ", " +
               std::string(token_kind_name(t.kind)) + ")";
      });

  py::class_<RuleTable>(m, "RuleTable")
      .def_static("load", [](const std::vector<std::string>& paths) {
        return RuleTable::load_files(paths);
      })
      .def_property_readonly("has_ambiguity", &RuleTable::has_ambiguity)
      .def_property_readonly("ambiguity_tags", &RuleTable::ambiguity_tags)
      .def("__len__", [](const RuleTable& t) { return t.rules().size(); });

  py::class_<TaggerModel>(m, "TaggerModel")
      .def_static("load", [](const std::string& path) {
        return load_model(path);
      })
      .def("save", [](const TaggerModel& model, const std::string& path) {
        save_model(model, path);
      })
      .def_property_readonly("tags",
                             [](const TaggerModel& m_) { return m_.vocab.tags; })
      .def_property_readonly("embed_dim",
                             [](const TaggerModel& m_) { return m_.embed_dim; })
      .def_property_readonly("hidden_dim", [](const TaggerModel& m_) {
        return m_.hidden_dim;
      });

  py::class_<TranslationResult>(m, "TranslationResult")
      .def_property_readonly(
          "cells",
          [](const TranslationResult& r) { return masks_from_cells(r.cells); })
      .def_property_readonly(
          "unicode",
          [](const TranslationResult& r) { return to_unicode(r.cells); })
      .def_property_readonly(
          "brf", [](const TranslationResult& r) { return to_brf(r.cells); })
      .def_property_readonly(
          "dots",
          [](const TranslationResult& r) { return to_dot_notation(r.cells); })
      .def_readonly("script", &TranslationResult::script)
      .def_readonly("model_sites", &TranslationResult::model_sites)
      .def_property_readonly(
          "untranslated", [](const TranslationResult& r) {
            std::vector<std::string> texts;
            for (std::size_t idx : r.untranslated)
              texts.push_back(r.tokens[idx].text);
            return texts;
          });

  m.def("normalize_nfc",
        [](const std::string& text) { return normalize_nfc(text); });
  m.def(
      "detect_script",
      [](const std::string& text) -> py::object {
        auto s = detect_script(text);
        if (!s) return py::none();
        return py::cast(*s);
      },
      py::arg("text"));
  m.def(
      "segment",
      [](const std::string& text, Script script) {
        return segment(text, script);
      },
      py::arg("text"), py::arg("script"));
  m.def(
      "translate",
      [](const std::string& text, const RuleTable& table,
         const TaggerModel* model, py::object script, bool rule_only) {
        std::optional<Script> s;
        if (!script.is_none()) s = script.cast<Script>();
        return translate_hybrid(
            text, table, model, s,
            rule_only ? Resolution::FirstCandidate : Resolution::Hybrid);
      },
      py::arg("text"), py::arg("table"), py::arg("model") = nullptr,
      py::arg("script") = py::none(), py::arg("rule_only") = false,
      py::keep_alive<0, 2>());

  m.def("to_unicode", [](const std::vector<int>& masks) {
    return to_unicode(cells_from_masks(masks));
  });
  m.def("to_brf", [](const std::vector<int>& masks) {
    return to_brf(cells_from_masks(masks));
  });
  m.def("to_dots", [](const std::vector<int>& masks) {
    return to_dot_notation(cells_from_masks(masks));
  });
  m.def("parse_dots", [](const std::string& text) {
    return masks_from_cells(parse_dot_notation(text));
  });

  m.def(
      "train",
      [](const std::string& corpus_path, const RuleTable& table, int epochs,
         double lr, int embed_dim, int hidden_dim, int layers, double dropout,
         uint64_t seed) {
        TaggedCorpus corpus =
            load_tagged_corpus(corpus_path, table.ambiguity_tags());
        TrainOptions options;
        options.epochs = epochs;
        options.learning_rate = lr;
        options.embed_dim = embed_dim;
        options.hidden_dim = hidden_dim;
        options.layers = layers;
        options.dropout = dropout;
        options.seed = seed;
        std::vector<double> trace;
        TaggerModel model =
            train_on_corpus(corpus, table.ambiguity_tags(), options, &trace);
        return py::make_tuple(model, trace);
      },
      py::arg("corpus_path"), py::arg("table"), py::arg("epochs") = 30,
      py::arg("lr") = 0.1, py::arg("embed_dim") = 32,
      py::arg("hidden_dim") = 64, py::arg("layers") = 1,
      py::arg("dropout") = 0.25, py::arg("seed") = 1);

  m.def(
      "generate_corpus",
      [](const RuleTable& table, Script script, std::size_t count,
         double inject, uint64_t seed, const std::string& gold_out,
         const std::string& tagged_out) {
        GeneratorOptions options;
        options.pair_count = count;
        options.inject_rate = inject;
        options.seed = seed;
        GeneratedCorpus corpus = generate_corpus(table, script, options);
        if (!gold_out.empty()) {
          std::ostringstream gold;
          save_gold_corpus(corpus.pairs, gold);
          atomic_write_file(gold_out, gold.str());
        }
        if (!tagged_out.empty()) {
          std::ostringstream tagged;
          save_tagged_corpus(corpus.tagged, tagged);
          atomic_write_file(tagged_out, tagged.str());
        }
        return py::make_tuple(corpus.pairs.size(), corpus.site_count);
      },
      py::arg("table"), py::arg("script"), py::arg("count") = 100,
      py::arg("inject") = 0.1, py::arg("seed") = 1, py::arg("gold_out") = "",
      py::arg("tagged_out") = "");

  m.def(
      "evaluate",
      [](const std::string& gold_path, const RuleTable& table,
         const TaggerModel* model) {
        EvalReport report = evaluate(load_gold_corpus(gold_path), table, model);
        py::list rows;
        for (const ScriptResult& row : report.rows) {
          py::dict d;
          d["script"] = std::string(script_name(row.script));
          d["rule_based"] = row.rule_accuracy();
          d["lstm"] = row.hybrid_accuracy();
          d["total"] = row.hybrid_total;
          d["correct"] = row.hybrid_correct;
          d["untranslated"] = row.untranslated;
          rows.append(d);
        }
        return py::make_tuple(rows, render_report(report));
      },
      py::arg("gold_path"), py::arg("table"), py::arg("model") = nullptr);

  py::register_exception<table_error>(m, "TableError");
  py::register_exception<format_error>(m, "FormatError");
  py::register_exception<detection_error>(m, "DetectionError");
  py::register_exception<missing_model_error>(m, "MissingModelError");
  py::register_exception<divergence_error>(m, "DivergenceError");
  py::register_exception<corpus_error>(m, "CorpusError");

  m.attr("__version__") = "0.1.0";
}
