#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <sstream>

#include "scylla/cli.hpp"
#include "scylla/daisy.hpp"
#include "scylla/error.hpp"
#include "scylla/ingest.hpp"
#include "scylla/lexicon.hpp"
#include "scylla/metrics.hpp"
#include "scylla/providers.hpp"
#include "scylla/scylla_s.hpp"
#include "scylla/scylla_t.hpp"

namespace py = pybind11;
using namespace scylla;

namespace {

// Frame names to ids, for overlap scores computed from plain name lists.
FrameMultiset multiset_of(const std::vector<std::string>& names, std::map<std::string, std::uint32_t>& ids) {
  FrameMultiset m;
  for (const auto& n : names) {
    auto [it, fresh] = ids.emplace(n, static_cast<std::uint32_t>(ids.size()));
    m.add(FrameId{it->second});
  }
  return m;
}

std::vector<std::string> frame_names(const FrameMultiset& m, const Lexicon& lex) {
  std::vector<std::string> out;
  for (const auto& [f, c] : m.counts()) {
    for (int k = 0; k < c; ++k) out.push_back(lex.frame(f).name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

py::dict ter_dict(const TerResult& r) {
  py::dict d;
  d["score"] = r.score;
  d["insertions"] = r.breakdown.insertions;
  d["deletions"] = r.breakdown.deletions;
  d["substitutions"] = r.breakdown.substitutions;
  d["shifts"] = r.breakdown.shifts;
  d["reference_length"] = r.breakdown.reference_length;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frame-based disambiguation and terminology injection for MT";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<LexiconError>(m, "LexiconError", base.ptr());
  py::register_exception<UnknownLuError>(m, "UnknownLuError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  auto provider_error = py::register_exception<ProviderError>(m, "ProviderError", base.ptr());
  py::register_exception<UnsupportedLanguageError>(m, "UnsupportedLanguageError", provider_error.ptr());
  py::register_exception<MalformedResponseError>(m, "MalformedResponseError", base.ptr());
  py::register_exception<EvalError>(m, "EvalError", base.ptr());

  py::class_<Lexicon>(m, "Lexicon")
      .def_static("load", [](const std::filesystem::path& p) { return Lexicon::load(p); }, py::arg("path"))
      .def_static("parse", [](const std::string& text) { return Lexicon::parse(text); }, py::arg("text"))
      .def_property_readonly("name", &Lexicon::name)
      .def_property_readonly("languages", &Lexicon::languages)
      .def("frame_names", [](const Lexicon& l) {
        std::vector<std::string> out;
        for (const auto& f : l.frames()) out.push_back(f.name);
        return out;
      })
      .def("equivalents", [](const Lexicon& l, const std::string& lu_key, const std::string& target) {
        auto id = l.find_lu_by_key(lu_key);
        if (!id) throw UnknownLuError("no LU with key " + lu_key);
        std::vector<std::string> out;
        for (const auto* e : l.equivalents_of(*id, target)) out.push_back(e->lemma);
        return out;
      }, py::arg("lu_key"), py::arg("target"));

  py::class_<ParsedSentence>(m, "Sentence")
      .def_readonly("id", &ParsedSentence::id)
      .def_readonly("language", &ParsedSentence::language)
      .def_property_readonly("forms", [](const ParsedSentence& s) {
        std::vector<std::string> out;
        for (const auto& t : s.tokens) out.push_back(t.form);
        return out;
      })
      .def_property_readonly("lemmas", [](const ParsedSentence& s) {
        std::vector<std::string> out;
        for (const auto& t : s.tokens) out.push_back(t.lemma);
        return out;
      })
      .def("surface", &ParsedSentence::surface)
      .def("to_conllu", [](const ParsedSentence& s) { return to_conllu(s); })
      .def("__repr__", [](const ParsedSentence& s) { return "<Sentence " + s.id + ": " + s.surface() + ">"; });

  m.def("parse_conllu", [](const std::string& text, const std::string& lang) { return parse_conllu(text, lang); },
        py::arg("text"), py::arg("lang") = "br-pt");
  m.def("load_conllu", [](const std::string& path, const std::string& lang) { return load_conllu(path, lang); },
        py::arg("path"), py::arg("lang") = "br-pt");

  m.def("output_fn", &output_fn, py::arg("activation"));
  m.def("jaro_winkler", [](const std::string& a, const std::string& b) { return jaro_winkler(a, b); });
  m.def("frame_overlap", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::string, std::uint32_t> ids;
    auto x = multiset_of(a, ids);
    auto y = multiset_of(b, ids);
    return semantic_similarity(x, y);
  }, py::arg("source_frames"), py::arg("target_frames"));

  m.def("disambiguate", [](const ParsedSentence& s, const Lexicon& lex) {
    auto a = analyze_sentence(s, lex);
    py::list out;
    for (const auto& fa : a.assignments) {
      py::dict d;
      d["tokens"] = fa.lemma_span.token_indices;
      d["lemma"] = fa.lemma_span.surface_lemma;
      d["frame"] = lex.frame(fa.chosen_frame).name;
      d["lu"] = lex.display_name(fa.chosen_lu);
      py::dict scores;
      for (const auto& [lu, sc] : fa.lu_scores) scores[py::str(lex.frame(lex.lu(lu).evokes).name)] = sc;
      d["scores"] = scores;
      out.append(d);
    }
    return out;
  }, py::arg("sentence"), py::arg("lexicon"));
  m.def("frames_of_sentence", [](const ParsedSentence& s, const Lexicon& lex) {
    return frame_names(frames_of_sentence(s, lex), lex);
  }, py::arg("sentence"), py::arg("lexicon"));

  py::class_<TranslationProvider, std::shared_ptr<TranslationProvider>>(m, "TranslationProvider")
      .def("translate", [](const TranslationProvider& p, const std::string& text, const std::string& src,
                           const std::string& tgt, int n_best) {
        std::vector<std::string> out;
        for (const auto& h : p.translate({text, src, tgt, n_best, true})) out.push_back(h.text);
        return out;
      }, py::arg("text"), py::arg("source") = "br-pt", py::arg("target") = "en", py::arg("n_best") = 1);
  py::class_<MockTranslationProvider, TranslationProvider, std::shared_ptr<MockTranslationProvider>>(
      m, "MockTranslationProvider")
      .def_static("load", [](const std::filesystem::path& p) {
        return std::make_shared<MockTranslationProvider>(MockTranslationProvider::load(p));
      });

  py::class_<DictionaryProvider, std::shared_ptr<DictionaryProvider>>(m, "DictionaryProvider")
      .def("lookup", [](const DictionaryProvider& d, const std::string& word, const std::string& src,
                        const std::string& tgt) -> py::object {
        auto e = d.lookup(word, src, tgt);
        if (!e) return py::none();
        py::dict out;
        out["headword"] = e->headword;
        out["translations"] = e->translations;
        out["synonyms"] = e->synonyms;
        out["lemma"] = e->lemma;
        return out;
      }, py::arg("word"), py::arg("source") = "en", py::arg("target") = "br-pt");
  py::class_<FileDictionary, DictionaryProvider, std::shared_ptr<FileDictionary>>(m, "FileDictionary")
      .def_static("load", [](const std::filesystem::path& p) {
        return std::make_shared<FileDictionary>(FileDictionary::load(p));
      });

  m.def("load_translation_provider", [](const std::filesystem::path& p) {
    return std::const_pointer_cast<TranslationProvider>(load_translation_provider(p));
  }, py::arg("config"));
  m.def("load_dictionary_provider", [](const std::filesystem::path& p) {
    return std::const_pointer_cast<DictionaryProvider>(load_dictionary_provider(p));
  }, py::arg("config"));

  m.def("hybrid", [](const ParsedSentence& s, const Lexicon& lex, const std::string& target) {
    auto a = analyze_sentence(s, lex);
    return inject_source(s, a.assignments, lex, target).text();
  }, py::arg("sentence"), py::arg("lexicon"), py::arg("target") = "en");
  m.def("translate_s", [](const ParsedSentence& s, const Lexicon& lex, const TranslationProvider& p,
                          const std::string& target) { return translate_s(s, lex, p, target); },
        py::arg("sentence"), py::arg("lexicon"), py::arg("provider"), py::arg("target") = "en",
        py::call_guard<py::gil_scoped_release>());
  m.def("translate_t", [](const ParsedSentence& s, const Lexicon& lex, const TranslationProvider& p,
                          const DictionaryProvider* d, const std::string& target, int n_best) {
    return translate_t(s, lex, p, d, target, n_best);
  }, py::arg("sentence"), py::arg("lexicon"), py::arg("provider"), py::arg("dictionary") = nullptr,
        py::arg("target") = "en", py::arg("n_best") = 5, py::call_guard<py::gil_scoped_release>());

  m.def("ter", [](const std::string& h, const std::string& r) { return ter_dict(ter(h, r)); },
        py::arg("hypothesis"), py::arg("reference"));
  m.def("hter", [](const std::string& h, const std::vector<std::string>& pe) { return hter(h, pe); },
        py::arg("hypothesis"), py::arg("post_edits"));
  m.def("bleu", [](const std::vector<std::string>& hyps, const std::vector<std::vector<std::string>>& refs) {
    if (hyps.size() != refs.size()) throw EvalError("hypotheses and references differ in length");
    std::vector<BleuSegment> corpus;
    for (std::size_t i = 0; i < hyps.size(); ++i) corpus.push_back({hyps[i], refs[i]});
    return bleu(corpus);
  }, py::arg("hypotheses"), py::arg("references"));
  m.def("sentence_bleu", [](const std::string& h, const std::vector<std::string>& refs) { return sentence_bleu(h, refs); },
        py::arg("hypothesis"), py::arg("references"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command-line tool in process; returns (exit code, stdout, stderr).");
}
