#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scylla/lexicon.hpp"

namespace scylla {

struct ParsedToken {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos = "_";
  std::string feats = "_";
  int head = 0;  // 0 = root
  std::string deprel;
  std::string deps = "_";
  std::string misc = "_";

  bool space_after() const;
};

// A CoNLL-U multiword token line such as "12-13 na".
struct MultiwordToken {
  int first = 0;
  int last = 0;
  std::string form;
  std::string misc = "_";

  bool space_after() const;
};

struct ParsedSentence {
  std::string id;
  std::string text;
  Language language;
  std::vector<std::string> comments;  // raw "# ..." lines, in order
  std::vector<ParsedToken> tokens;
  std::vector<MultiwordToken> multiword_tokens;

  const ParsedToken& token(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }
  // The multiword token covering `index`, if any.
  const MultiwordToken* multiword_at(int index) const;
  // Surface text rebuilt from forms and SpaceAfter=No markers.
  std::string surface() const;
};

struct LemmaSpan {
  std::vector<int> token_indices;  // strictly increasing
  std::string surface_lemma;
  bool is_mwe = false;
  std::string surface_form;  // space-joined word forms

  int first() const { return token_indices.front(); }
  int last() const { return token_indices.back(); }
  bool contains(int index) const;
  friend bool operator==(const LemmaSpan&, const LemmaSpan&) = default;
};

struct Cluster {
  int id = 0;
  std::vector<LemmaSpan> members;
};

// Parses CoNLL-U. Multiword-token ranges are kept for surface
// reconstruction; empty nodes (decimal ids) are skipped. A "# lang = xx"
// comment overrides `default_language` for its sentence.
std::vector<ParsedSentence> parse_conllu(std::string_view text,
                                         std::string_view default_language = "br-pt",
                                         const std::string& source = "<conllu>");
std::vector<ParsedSentence> load_conllu(const std::string& path,
                                        std::string_view default_language = "br-pt");
std::string to_conllu(const ParsedSentence& sentence);

// UPOS tags that never form a span on their own.
bool is_function_upos(std::string_view upos);

std::vector<LemmaSpan> match_mwes(const ParsedSentence& sentence, const Lexicon& lexicon);

// Connected components of "A's governor lies in B" plus "A and B are
// core or oblique dependents of the same verb". Ids follow leftmost token.
std::vector<Cluster> build_clusters(const ParsedSentence& sentence, std::span<const LemmaSpan> spans);

// Groups spans between clause punctuation (, ; : . ! ?), for input that has
// no dependency tree.
std::vector<Cluster> window_clusters(const ParsedSentence& sentence, std::span<const LemmaSpan> spans);

}  // namespace scylla
