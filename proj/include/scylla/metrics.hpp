#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scylla {

// Lowercase, drop sentence-final punctuation, split the remaining
// punctuation off as tokens, split on whitespace. Intra-word hyphens and
// apostrophes stay.
std::vector<std::string> tokenize_for_eval(std::string_view text);

struct EditBreakdown {
  int insertions = 0;
  int deletions = 0;
  int substitutions = 0;
  int shifts = 0;
  int reference_length = 0;

  int edits() const { return insertions + deletions + substitutions + shifts; }
  friend bool operator==(const EditBreakdown&, const EditBreakdown&) = default;
};

struct TerResult {
  double score = 0.0;  // fraction, edits / reference length
  EditBreakdown breakdown;
};

// Token-level Levenshtein distance, no shifts.
int edit_distance(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);

struct TerOptions {
  int max_shift_size = 10;
  int max_shift_distance = 50;
  bool shifts = true;
};

// Throws EvalError for an empty reference.
TerResult ter_tokens(std::vector<std::string> hyp, const std::vector<std::string>& ref,
                     const TerOptions& options = {});
TerResult ter(std::string_view hypothesis, std::string_view reference, const TerOptions& options = {});

// Mean TER over the post-edited versions. Throws EvalError for an empty list.
double hter(std::string_view hypothesis, const std::vector<std::string>& post_edits);

struct BleuSegment {
  std::string hypothesis;
  std::vector<std::string> references;
};

// Corpus BLEU in [0, 100]: 4-grams, uniform weights, clipped counts, brevity
// penalty against the closest reference length. Throws EvalError when empty.
double bleu(const std::vector<BleuSegment>& corpus);
// Sentence BLEU with add-one smoothing on 2- to 4-gram precisions.
double sentence_bleu(std::string_view hypothesis, const std::vector<std::string>& references);

struct SentenceScore {
  std::string id;
  double bleu_smoothed = 0.0;
  double ter = 0.0;
  EditBreakdown breakdown;
};

struct EvalReport {
  std::vector<SentenceScore> per_sentence;
  double corpus_bleu = 0.0;
  double mean_ter = 0.0;
};

// Line-aligned hypotheses and references (one list of references per line).
EvalReport evaluate(const std::vector<std::string>& hypotheses,
                    const std::vector<std::vector<std::string>>& references);

// Truncates rather than rounds: 26.666 -> "26.66".
std::string format_truncated(double value, int decimals = 2);

}  // namespace scylla
