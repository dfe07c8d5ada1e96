#include "scylla/scylla_t.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "scylla/text.hpp"

namespace scylla {

double jaro_winkler(std::string_view a, std::string_view b) {
  const std::u32string s = text::decode_utf8(a);
  const std::u32string t = text::decode_utf8(b);
  if (s.empty() && t.empty()) return 1.0;
  if (s.empty() || t.empty()) return 0.0;

  const std::size_t window = std::max<std::size_t>(std::max(s.size(), t.size()) / 2, 1) - 1;
  std::vector<bool> s_hit(s.size(), false), t_hit(t.size(), false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(i + window + 1, t.size());
    for (std::size_t j = lo; j < hi; ++j) {
      if (t_hit[j] || s[i] != t[j]) continue;
      s_hit[i] = t_hit[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < s.size(); ++i) {
    if (!s_hit[i]) continue;
    while (!t_hit[j]) ++j;
    if (s[i] != t[j]) ++half_transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double jaro =
      (m / static_cast<double>(s.size()) + m / static_cast<double>(t.size()) +
       (m - static_cast<double>(half_transpositions / 2)) / m) /
      3.0;
  if (jaro < 0.7) return jaro;

  std::size_t prefix = 0;
  while (prefix < 4 && prefix < s.size() && prefix < t.size() && s[prefix] == t[prefix]) ++prefix;
  return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

long long semantic_similarity(const FrameMultiset& source, const FrameMultiset& target) {
  const auto& small = source.counts().size() <= target.counts().size() ? source : target;
  const auto& large = &small == &source ? target : source;
  long long s = 0;
  for (const auto& [frame, count] : small.counts()) s += static_cast<long long>(count) * large.count(frame);
  return s;
}

// ---------------------------------------------------------------------------
// Target-side analysis

ParsedSentence tokenize_text(std::string_view input, std::string_view language) {
  ParsedSentence out;
  out.text = std::string(input);
  out.language = std::string(language);

  auto push = [&](std::u32string_view piece, bool punct, bool space_after) {
    ParsedToken t;
    t.index = static_cast<int>(out.tokens.size()) + 1;
    t.form = text::encode_utf8(piece);
    t.lemma = text::to_lower(t.form);
    t.upos = punct ? "PUNCT" : "X";
    t.head = 0;
    t.deprel = t.index == 1 ? "root" : "dep";
    if (!space_after) t.misc = "SpaceAfter=No";
    out.tokens.push_back(std::move(t));
  };

  for (const auto& chunk : text::split_whitespace(input)) {
    const std::u32string w = text::decode_utf8(chunk);
    std::size_t b = 0, e = w.size();
    while (b < e && text::is_punctuation(w[b])) ++b;
    while (e > b && text::is_punctuation(w[e - 1])) --e;
    std::vector<std::pair<std::u32string, bool>> pieces;
    for (std::size_t i = 0; i < b; ++i) pieces.emplace_back(w.substr(i, 1), true);
    if (e > b) pieces.emplace_back(w.substr(b, e - b), false);
    for (std::size_t i = std::max(b, e); i < w.size(); ++i) pieces.emplace_back(w.substr(i, 1), true);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      push(pieces[i].first, pieces[i].second, i + 1 == pieces.size());
    }
  }
  if (!out.tokens.empty()) out.tokens.back().misc = "_";
  return out;
}

void lemmatize(ParsedSentence& sentence, const Lexicon& lexicon, const DictionaryProvider* dictionary,
               std::string_view dictionary_target) {
  for (auto& t : sentence.tokens) {
    if (t.upos == "PUNCT") continue;
    std::string low = text::to_lower(t.form);
    t.lemma = low;
    if (lexicon.has_lemma(low, sentence.language)) continue;
    if (!dictionary) continue;
    auto entry = dictionary->lookup(t.form, sentence.language, dictionary_target);
    if (entry && !entry->lemma.empty()) t.lemma = text::to_lower(entry->lemma);
  }
}

SentenceAnalysis analyze_text(std::string_view input, std::string_view language, const Lexicon& lexicon,
                              const DictionaryProvider* dictionary, std::string_view source_language) {
  ParsedSentence s = tokenize_text(input, language);
  lemmatize(s, lexicon, dictionary, source_language);
  return analyze_sentence(s, lexicon, Clustering::window);
}

// ---------------------------------------------------------------------------
// Alignment

const char* to_string(AlignmentPair::Via via) {
  switch (via) {
    case AlignmentPair::Via::framenet_equivalent: return "framenet_equivalent";
    case AlignmentPair::Via::dictionary_translation: return "dictionary_translation";
    case AlignmentPair::Via::synonym: return "synonym";
  }
  return "?";
}

namespace {

struct Word {
  std::string text;
  AlignmentPair::Via via;
};

void add_word(std::vector<Word>& words, std::string w, AlignmentPair::Via via) {
  w = text::to_lower(text::trim(w));
  if (w.empty()) return;
  for (const auto& x : words) {
    if (x.text == w) return;
  }
  words.push_back({std::move(w), via});
}

// Source lemma first, then co-evoking LUs of the chosen frame, then dictionary synonyms.
std::vector<Word> source_words(const FrameAssignment& a, const Lexicon& lexicon, std::string_view source_language,
                              std::string_view target_language, const DictionaryProvider* dictionary) {
  std::vector<Word> words;
  add_word(words, a.lemma_span.surface_lemma, AlignmentPair::Via::framenet_equivalent);
  for (const auto& lu : lexicon.lexical_units()) {
    if (lu.evokes == a.chosen_frame && lu.language == source_language && lu.id != a.chosen_lu) {
      add_word(words, lu.lemma, AlignmentPair::Via::synonym);
    }
  }
  if (dictionary) {
    if (auto e = dictionary->lookup(a.lemma_span.surface_lemma, source_language, target_language)) {
      for (const auto& syn : e->synonyms) add_word(words, syn, AlignmentPair::Via::synonym);
    }
  }
  return words;
}

std::vector<Word> back_translations(const LemmaSpan& span, const ParsedSentence& hypothesis, const Lexicon& lexicon,
                                    std::string_view source_language, const DictionaryProvider* dictionary) {
  std::vector<Word> words;
  for (const LexicalUnit* lu : lexicon.lus_for_lemma(span.surface_lemma, hypothesis.language)) {
    for (const LexicalUnit* eq : lexicon.equivalents_of(lu->id, source_language)) {
      add_word(words, eq->lemma, AlignmentPair::Via::framenet_equivalent);
    }
  }
  if (dictionary) {
    std::vector<std::string> keys{span.surface_lemma};
    std::string form = text::to_lower(span.surface_form);
    if (!form.empty() && form != span.surface_lemma) keys.push_back(form);
    for (const auto& key : keys) {
      if (auto e = dictionary->lookup(key, hypothesis.language, source_language)) {
        for (const auto& tr : e->translations) add_word(words, tr, AlignmentPair::Via::dictionary_translation);
      }
    }
  }
  return words;
}

}  // namespace

std::vector<AlignmentPair> align(const ParsedSentence& source, const SentenceAnalysis& source_analysis,
                                 const ParsedSentence& hypothesis, const Lexicon& lexicon,
                                 const DictionaryProvider* dictionary, const AlignOptions& options) {
  std::vector<std::vector<Word>> src_words;
  for (const auto& a : source_analysis.assignments) {
    src_words.push_back(source_words(a, lexicon, source.language, hypothesis.language, dictionary));
  }

  struct Scored {
    AlignmentPair pair;
    std::size_t hyp;
    std::size_t src;
  };
  std::vector<Scored> scored;
  const auto hyp_spans = match_mwes(hypothesis, lexicon);
  for (std::size_t h = 0; h < hyp_spans.size(); ++h) {
    const auto back = back_translations(hyp_spans[h], hypothesis, lexicon, source.language, dictionary);
    if (back.empty()) continue;
    for (std::size_t s = 0; s < src_words.size(); ++s) {
      std::optional<AlignmentPair> best;
      for (const auto& b : back) {
        for (const auto& w : src_words[s]) {
          double jw = jaro_winkler(b.text, w.text);
          if (jw < options.jw_threshold || (best && jw <= best->match_score)) continue;
          AlignmentPair p;
          p.target_span = hyp_spans[h];
          p.source_span = source_analysis.assignments[s].lemma_span;
          p.match_score = jw;
          p.via = w.via == AlignmentPair::Via::synonym ? AlignmentPair::Via::synonym : b.via;
          p.back_translation = b.text;
          p.source_word = w.text;
          best = std::move(p);
        }
      }
      if (best) scored.push_back({std::move(*best), h, s});
    }
  }

  std::stable_sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
    if (x.pair.match_score != y.pair.match_score) return x.pair.match_score > y.pair.match_score;
    if (x.hyp != y.hyp) return x.hyp < y.hyp;
    return x.src < y.src;
  });
  std::set<std::size_t> used_hyp, used_src;
  std::vector<AlignmentPair> out;
  for (auto& s : scored) {
    if (used_hyp.count(s.hyp) || used_src.count(s.src)) continue;
    used_hyp.insert(s.hyp);
    used_src.insert(s.src);
    out.push_back(std::move(s.pair));
  }
  std::sort(out.begin(), out.end(), [](const AlignmentPair& x, const AlignmentPair& y) {
    return x.target_span.first() < y.target_span.first();
  });
  return out;
}

std::vector<InjectionPoint> injection_points(std::span<const AlignmentPair> alignments,
                                             const SentenceAnalysis& source_analysis, const Lexicon& lexicon,
                                             std::string_view target_language) {
  std::vector<InjectionPoint> out;
  for (const auto& a : alignments) {
    const FrameAssignment* fa = source_analysis.assignment_for(a.source_span);
    if (!fa) continue;
    InjectionPoint p;
    p.first = a.target_span.first();
    p.last = a.target_span.last();
    for (const LexicalUnit* eq : lexicon.equivalents_of(fa->chosen_lu, target_language)) {
      if (std::find(p.alternatives.begin(), p.alternatives.end(), eq->lemma) == p.alternatives.end()) {
        p.alternatives.push_back(eq->lemma);
      }
    }
    if (p.alternatives.empty()) continue;
    p.alignment = a;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration and selection

Candidate render_candidate(const HypothesisPlan& plan, int plan_index, const std::vector<int>& decisions) {
  Candidate c;
  c.hypothesis = plan_index;
  c.rank = plan.hypothesis.rank;
  c.decisions = decisions;

  std::map<int, std::pair<const InjectionPoint*, int>> at;
  for (std::size_t i = 0; i < plan.points.size(); ++i) {
    if (i < decisions.size() && decisions[i] >= 0) at[plan.points[i].first] = {&plan.points[i], decisions[i]};
  }
  const auto& toks = plan.tokens;
  const int n = static_cast<int>(toks.tokens.size());
  for (int i = 1; i <= n;) {
    std::string piece;
    bool space;
    if (auto it = at.find(i); it != at.end()) {
      const auto& [point, alt] = it->second;
      std::string original;
      for (int k = point->first; k <= point->last; ++k) {
        original += toks.token(k).form;
        if (k < point->last && toks.token(k).space_after()) original += ' ';
      }
      piece = point->alternatives.at(static_cast<std::size_t>(alt));
      if (text::starts_upper(toks.token(point->first).form)) piece = text::capitalize_first(piece);
      if (text::to_lower(piece) != text::to_lower(original)) ++c.substitutions;
      space = toks.token(point->last).space_after();
      i = point->last + 1;
    } else {
      piece = toks.token(i).form;
      space = toks.token(i).space_after();
      ++i;
    }
    c.text += piece;
    if (space && i <= n) c.text += ' ';
  }
  return c;
}

namespace {

void walk_tree(const HypothesisPlan& plan, int plan_index, std::size_t point, std::size_t alt,
               std::vector<int>& decisions, const std::function<void(const Candidate&)>& sink) {
  if (point == plan.points.size()) {
    sink(render_candidate(plan, plan_index, decisions));
    return;
  }
  const auto& alternatives = plan.points[point].alternatives;
  if (alt == alternatives.size()) {
    decisions[point] = -1;
    walk_tree(plan, plan_index, point + 1, 0, decisions, sink);
    return;
  }
  decisions[point] = static_cast<int>(alt);
  walk_tree(plan, plan_index, point + 1, 0, decisions, sink);
  walk_tree(plan, plan_index, point, alt + 1, decisions, sink);
}

}  // namespace

void enumerate_candidates(std::span<const HypothesisPlan> plans, const std::function<void(const Candidate&)>& sink) {
  for (std::size_t p = 0; p < plans.size(); ++p) {
    std::vector<int> decisions(plans[p].points.size(), -1);
    walk_tree(plans[p], static_cast<int>(p), 0, 0, decisions, sink);
  }
}

std::size_t candidate_count(std::span<const HypothesisPlan> plans) {
  std::size_t total = 0;
  for (const auto& plan : plans) {
    std::size_t n = 1;
    for (const auto& point : plan.points) n *= 1 + point.alternatives.size();
    total += n;
  }
  return total;
}

bool better_candidate(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.candidate.substitutions != b.candidate.substitutions) {
    return a.candidate.substitutions < b.candidate.substitutions;
  }
  if (a.candidate.rank != b.candidate.rank) return a.candidate.rank < b.candidate.rank;
  return a.candidate.text < b.candidate.text;
}

ScoredCandidate search_best(std::span<const HypothesisPlan> plans, const FrameMultiset& source_frames,
                            const FrameScorer& scorer, std::vector<ScoredCandidate>* trace) {
  std::map<std::string, FrameMultiset> memo;
  std::optional<ScoredCandidate> best;
  enumerate_candidates(plans, [&](const Candidate& c) {
    auto it = memo.find(c.text);
    if (it == memo.end()) it = memo.emplace(c.text, scorer(c.text)).first;
    ScoredCandidate sc{c, it->second, semantic_similarity(source_frames, it->second)};
    if (!best || better_candidate(sc, *best)) best = sc;
    if (trace) trace->push_back(std::move(sc));
  });
  if (!best) throw Error("no candidates to choose from");
  return *best;
}

// ---------------------------------------------------------------------------

ScyllaTResult run_scylla_t(const ParsedSentence& sentence, const Lexicon& lexicon,
                           const TranslationProvider& provider, const DictionaryProvider* dictionary,
                           std::string_view target_language, const ScyllaTOptions& options) {
  ScyllaTResult r;
  r.source_analysis = analyze_sentence(sentence, lexicon);
  const FrameMultiset source_frames = r.source_analysis.frames();

  TranslationRequest req;
  req.source_text = sentence.surface();
  req.source_language = sentence.language;
  req.target_language = std::string(target_language);
  req.n_best = options.n_best;
  req.copy_unknown = true;
  const auto markup = provider.no_translate();
  auto hyps = provider.translate(req);
  if (hyps.empty()) throw MalformedResponseError("provider returned no hypotheses");

  AlignOptions align_options;
  align_options.jw_threshold = options.jw_threshold;
  for (auto& h : hyps) {
    if (markup) h.text = markup->strip(h.text);
    HypothesisPlan plan;
    plan.hypothesis = h;
    plan.tokens = tokenize_text(h.text, target_language);
    lemmatize(plan.tokens, lexicon, dictionary, sentence.language);
    auto alignments = align(sentence, r.source_analysis, plan.tokens, lexicon, dictionary, align_options);
    plan.points = injection_points(alignments, r.source_analysis, lexicon, target_language);
    r.alignments.push_back(std::move(alignments));
    r.plans.push_back(std::move(plan));
  }

  FrameScorer scorer = [&](const std::string& text) {
    return analyze_text(text, target_language, lexicon, dictionary, sentence.language).frames();
  };
  r.best = search_best(r.plans, source_frames, scorer, options.keep_trace ? &r.trace : nullptr);
  r.baseline_score = semantic_similarity(source_frames, scorer(r.plans.front().hypothesis.text));
  return r;
}

std::string translate_t(const ParsedSentence& sentence, const Lexicon& lexicon, const TranslationProvider& provider,
                        const DictionaryProvider* dictionary, std::string_view target_language, int n_best) {
  ScyllaTOptions options;
  options.n_best = n_best;
  return run_scylla_t(sentence, lexicon, provider, dictionary, target_language, options).best.candidate.text;
}

}  // namespace scylla
