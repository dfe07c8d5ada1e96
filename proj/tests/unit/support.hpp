#pragma once

#include <string>

#include "scylla/ingest.hpp"
#include "scylla/lexicon.hpp"
#include "scylla/providers.hpp"

namespace support {

inline std::string data(const std::string& rel) { return std::string(SCYLLA_DATA_DIR) + "/" + rel; }

inline const scylla::Lexicon& sports() {
  static const scylla::Lexicon lex = scylla::Lexicon::load(data("fixtures/sports.lex"));
  return lex;
}

inline scylla::ParsedSentence sentence(const std::string& name) {
  return scylla::load_conllu(data("fixtures/" + name + ".conllu")).at(0);
}

inline scylla::LuId lu(const std::string& key) { return sports().find_lu_by_key(key).value(); }
inline scylla::FrameId frame(const std::string& name) { return sports().find_frame(name).value(); }

inline const scylla::MockTranslationProvider& mock() {
  static const auto m = scylla::MockTranslationProvider::load(data("fixtures/mock_nbest.tsv"));
  return m;
}

inline const scylla::FileDictionary& dictionary() {
  static const auto d = scylla::FileDictionary::load(data("fixtures/dictionary.tsv"));
  return d;
}

}  // namespace support
