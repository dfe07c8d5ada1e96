#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scylla/daisy.hpp"
#include "scylla/providers.hpp"

namespace scylla {

// Jaro-Winkler over code points; prefix scale 0.1, at most 4 prefix
// characters, boost applied once the Jaro score reaches 0.7.
double jaro_winkler(std::string_view a, std::string_view b);

// Frame overlap: sum over frames of mult_src * mult_tgt.
long long semantic_similarity(const FrameMultiset& source, const FrameMultiset& target);

// Splits text on whitespace and detaches leading/trailing punctuation.
// Punctuation tokens get UPOS PUNCT, others X; lemmas are lowercased forms.
// Spacing is kept in MISC so surface() reproduces the input.
ParsedSentence tokenize_text(std::string_view text, std::string_view language);

// Lemma per token: the lowercased form if the lexicon knows it as a lemma in
// the sentence language, else the dictionary's lemma field, else the form.
void lemmatize(ParsedSentence& sentence, const Lexicon& lexicon, const DictionaryProvider* dictionary,
               std::string_view dictionary_target);

// Target-side analysis: tokenize, lemmatize, window clusters, DAISY.
SentenceAnalysis analyze_text(std::string_view text, std::string_view language, const Lexicon& lexicon,
                              const DictionaryProvider* dictionary, std::string_view source_language);

struct AlignmentPair {
  enum class Via { framenet_equivalent, dictionary_translation, synonym };
  LemmaSpan target_span;
  LemmaSpan source_span;
  double match_score = 0.0;
  Via via = Via::framenet_equivalent;
  std::string back_translation;  // hypothesis-side word that matched
  std::string source_word;       // source lemma or synonym it matched
};

const char* to_string(AlignmentPair::Via via);

struct AlignOptions {
  double jw_threshold = 0.85;
};

// Aligns spans of a tokenized hypothesis to the assigned spans of the source
// analysis. One-to-one; best score first, then leftmost hypothesis span, then
// leftmost source span.
std::vector<AlignmentPair> align(const ParsedSentence& source, const SentenceAnalysis& source_analysis,
                                 const ParsedSentence& hypothesis, const Lexicon& lexicon,
                                 const DictionaryProvider* dictionary, const AlignOptions& options = {});

struct InjectionPoint {
  int first = 0;  // hypothesis token range, 1-based inclusive
  int last = 0;
  std::vector<std::string> alternatives;
  std::optional<AlignmentPair> alignment;
};

// Alternatives are the target equivalents of the aligned source span's chosen LU.
std::vector<InjectionPoint> injection_points(std::span<const AlignmentPair> alignments,
                                             const SentenceAnalysis& source_analysis, const Lexicon& lexicon,
                                             std::string_view target_language);

struct HypothesisPlan {
  TranslationHypothesis hypothesis;
  ParsedSentence tokens;
  std::vector<InjectionPoint> points;
};

struct Candidate {
  int hypothesis = 0;  // index into the plan list
  int rank = 1;
  std::string text;
  std::vector<int> decisions;  // per injection point: -1 keep, else alternative index
  int substitutions = 0;       // replacements that change the text (case-insensitive)
};

// Text of `plan` with the given decisions applied.
Candidate render_candidate(const HypothesisPlan& plan, int plan_index, const std::vector<int>& decisions);

// Binary tree over injection points: at each node the right child injects
// the current alternative and moves to the next point, the left child passes
// over it. Every hypothesis yields prod(1 + k_i) candidates.
void enumerate_candidates(std::span<const HypothesisPlan> plans, const std::function<void(const Candidate&)>& sink);
std::size_t candidate_count(std::span<const HypothesisPlan> plans);

struct ScoredCandidate {
  Candidate candidate;
  FrameMultiset frames;
  long long score = 0;
};

// Strict weak order used for selection: higher score, fewer substitutions,
// better rank, smaller text.
bool better_candidate(const ScoredCandidate& a, const ScoredCandidate& b);

using FrameScorer = std::function<FrameMultiset(const std::string& text)>;

// Scores every candidate and returns the best. `trace`, when given, receives
// every scored candidate in enumeration order.
ScoredCandidate search_best(std::span<const HypothesisPlan> plans, const FrameMultiset& source_frames,
                            const FrameScorer& scorer, std::vector<ScoredCandidate>* trace = nullptr);

struct ScyllaTOptions {
  int n_best = 5;
  double jw_threshold = 0.85;
  bool keep_trace = false;
};

struct ScyllaTResult {
  SentenceAnalysis source_analysis;
  std::vector<HypothesisPlan> plans;
  std::vector<std::vector<AlignmentPair>> alignments;  // per plan
  ScoredCandidate best;
  long long baseline_score = 0;  // rank-1 hypothesis, unchanged
  std::vector<ScoredCandidate> trace;
};

ScyllaTResult run_scylla_t(const ParsedSentence& sentence, const Lexicon& lexicon,
                           const TranslationProvider& provider, const DictionaryProvider* dictionary,
                           std::string_view target_language, const ScyllaTOptions& options = {});

std::string translate_t(const ParsedSentence& sentence, const Lexicon& lexicon, const TranslationProvider& provider,
                        const DictionaryProvider* dictionary, std::string_view target_language, int n_best = 5);

}  // namespace scylla
