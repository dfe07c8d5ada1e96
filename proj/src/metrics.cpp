#include "scylla/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "scylla/error.hpp"
#include "scylla/text.hpp"

namespace scylla {

namespace {

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'…'; }

bool is_word_char(char32_t c) { return !text::is_space(c) && !text::is_punctuation(c); }

}  // namespace

std::vector<std::string> tokenize_for_eval(std::string_view input) {
  std::u32string s = text::decode_utf8(text::to_lower(input));
  while (!s.empty() && (text::is_space(s.back()) || is_terminal(s.back()))) s.pop_back();

  std::vector<std::string> out;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(text::encode_utf8(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char32_t c = s[i];
    if (text::is_space(c)) {
      flush();
    } else if (text::is_punctuation(c)) {
      bool inner = i > 0 && i + 1 < s.size() && is_word_char(s[i - 1]) && is_word_char(s[i + 1]);
      if (inner) {
        cur += c;
      } else {
        flush();
        out.push_back(text::encode_utf8(std::u32string(1, c)));
      }
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// TER

int edit_distance(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  std::vector<int> prev(ref.size() + 1), cur(ref.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      int sub = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[ref.size()];
}

namespace {

// Full table so the edit operations can be read back.
EditBreakdown edit_operations(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  const std::size_t n = hyp.size(), m = ref.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      d[i][j] = std::min({d[i - 1][j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1), d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  EditBreakdown b;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1)) {
      if (hyp[i - 1] != ref[j - 1]) ++b.substitutions;
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ++b.deletions;
      --i;
    } else {
      ++b.insertions;
      --j;
    }
  }
  return b;
}

std::vector<std::string> move_block(const std::vector<std::string>& words, std::size_t start, std::size_t length,
                                    std::size_t target) {
  // `target` is an index into the sequence with the block removed.
  std::vector<std::string> rest;
  rest.reserve(words.size());
  rest.insert(rest.end(), words.begin(), words.begin() + static_cast<std::ptrdiff_t>(start));
  rest.insert(rest.end(), words.begin() + static_cast<std::ptrdiff_t>(start + length), words.end());
  std::vector<std::string> out(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(target));
  out.insert(out.end(), words.begin() + static_cast<std::ptrdiff_t>(start),
             words.begin() + static_cast<std::ptrdiff_t>(start + length));
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(target), rest.end());
  return out;
}

}  // namespace

TerResult ter_tokens(std::vector<std::string> hyp, const std::vector<std::string>& ref, const TerOptions& options) {
  if (ref.empty()) throw EvalError("TER needs a non-empty reference");
  int shifts = 0;
  int current = edit_distance(hyp, ref);
  while (options.shifts && current > 0) {
    // Greedy: apply the single block move with the largest distance reduction.
    int best_gain = 0;
    std::vector<std::string> best_hyp;
    const std::size_t n = hyp.size();
    for (std::size_t start = 0; start < n; ++start) {
      for (std::size_t len = 1; len <= static_cast<std::size_t>(options.max_shift_size) && start + len <= n; ++len) {
        // Only blocks that occur somewhere in the reference are worth moving.
        bool in_ref = false;
        for (std::size_t r = 0; r + len <= ref.size() && !in_ref; ++r) {
          in_ref = std::equal(hyp.begin() + static_cast<std::ptrdiff_t>(start),
                              hyp.begin() + static_cast<std::ptrdiff_t>(start + len),
                              ref.begin() + static_cast<std::ptrdiff_t>(r));
        }
        if (!in_ref) break;
        for (std::size_t target = 0; target + len <= n; ++target) {
          if (target == start) continue;
          std::size_t dist = target > start ? target - start : start - target;
          if (dist > static_cast<std::size_t>(options.max_shift_distance)) continue;
          auto moved = move_block(hyp, start, len, target);
          int gain = current - edit_distance(moved, ref);
          if (gain > best_gain) {
            best_gain = gain;
            best_hyp = std::move(moved);
          }
        }
      }
    }
    if (best_gain <= 0) break;
    hyp = std::move(best_hyp);
    current -= best_gain;
    ++shifts;
  }
  TerResult r;
  r.breakdown = edit_operations(hyp, ref);
  r.breakdown.shifts = shifts;
  r.breakdown.reference_length = static_cast<int>(ref.size());
  r.score = static_cast<double>(r.breakdown.edits()) / static_cast<double>(ref.size());
  return r;
}

TerResult ter(std::string_view hypothesis, std::string_view reference, const TerOptions& options) {
  return ter_tokens(tokenize_for_eval(hypothesis), tokenize_for_eval(reference), options);
}

double hter(std::string_view hypothesis, const std::vector<std::string>& post_edits) {
  if (post_edits.empty()) throw EvalError("HTER needs at least one post-edited reference");
  double sum = 0.0;
  for (const auto& pe : post_edits) sum += ter(hypothesis, pe).score;
  return sum / static_cast<double>(post_edits.size());
}

// ---------------------------------------------------------------------------
// BLEU

namespace {

constexpr int kMaxOrder = 4;

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const std::vector<std::string>& toks, int order) {
  NgramCounts c;
  for (std::size_t i = 0; i + static_cast<std::size_t>(order) <= toks.size(); ++i) {
    c[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                               toks.begin() + static_cast<std::ptrdiff_t>(i) + order)]++;
  }
  return c;
}

struct BleuStats {
  long long matches[kMaxOrder] = {};
  long long totals[kMaxOrder] = {};
  long long hyp_length = 0;
  long long ref_length = 0;
};

void accumulate(BleuStats& stats, std::string_view hypothesis, const std::vector<std::string>& references) {
  if (references.empty()) throw EvalError("BLEU segment without references");
  const auto hyp = tokenize_for_eval(hypothesis);
  std::vector<std::vector<std::string>> refs;
  for (const auto& r : references) refs.push_back(tokenize_for_eval(r));

  // Closest reference length; shorter wins a tie.
  std::size_t best = refs.front().size();
  for (const auto& r : refs) {
    auto diff = [&](std::size_t len) { return len > hyp.size() ? len - hyp.size() : hyp.size() - len; };
    if (diff(r.size()) < diff(best) || (diff(r.size()) == diff(best) && r.size() < best)) best = r.size();
  }
  stats.hyp_length += static_cast<long long>(hyp.size());
  stats.ref_length += static_cast<long long>(best);

  for (int n = 1; n <= kMaxOrder; ++n) {
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    for (const auto& [g, c] : ngrams(hyp, n)) {
      auto it = max_ref.find(g);
      stats.matches[n - 1] += std::min(c, it == max_ref.end() ? 0 : it->second);
      stats.totals[n - 1] += c;
    }
  }
}

double bleu_from(const BleuStats& s, bool smooth) {
  if (s.hyp_length == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    double m = static_cast<double>(s.matches[n]);
    double t = static_cast<double>(s.totals[n]);
    if (smooth && n > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  double bp = s.hyp_length > s.ref_length
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(s.ref_length) / static_cast<double>(s.hyp_length));
  return 100.0 * bp * std::exp(log_sum / kMaxOrder);
}

}  // namespace

double bleu(const std::vector<BleuSegment>& corpus) {
  if (corpus.empty()) throw EvalError("BLEU needs a non-empty corpus");
  BleuStats stats;
  for (const auto& seg : corpus) accumulate(stats, seg.hypothesis, seg.references);
  return bleu_from(stats, false);
}

double sentence_bleu(std::string_view hypothesis, const std::vector<std::string>& references) {
  BleuStats stats;
  accumulate(stats, hypothesis, references);
  return bleu_from(stats, true);
}

// ---------------------------------------------------------------------------

EvalReport evaluate(const std::vector<std::string>& hypotheses,
                    const std::vector<std::vector<std::string>>& references) {
  if (hypotheses.size() != references.size()) {
    throw EvalError("hypothesis and reference files differ in length (" + std::to_string(hypotheses.size()) +
                    " vs " + std::to_string(references.size()) + ")");
  }
  if (hypotheses.empty()) throw EvalError("nothing to evaluate");
  EvalReport report;
  std::vector<BleuSegment> corpus;
  double ter_sum = 0.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    SentenceScore s;
    s.id = std::to_string(i + 1);
    s.bleu_smoothed = sentence_bleu(hypotheses[i], references[i]);
    auto t = ter(hypotheses[i], references[i].at(0));
    s.ter = t.score;
    s.breakdown = t.breakdown;
    ter_sum += t.score;
    report.per_sentence.push_back(std::move(s));
    corpus.push_back({hypotheses[i], references[i]});
  }
  report.corpus_bleu = bleu(corpus);
  report.mean_ter = ter_sum / static_cast<double>(hypotheses.size());
  return report;
}

std::string format_truncated(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  double t = std::floor(value * scale + 1e-9) / scale;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, t);
  return buf;
}

}  // namespace scylla
