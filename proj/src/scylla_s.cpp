#include "scylla/scylla_s.hpp"

#include <map>

#include "scylla/text.hpp"

namespace scylla {

std::string HybridSentence::text(const std::optional<NoTranslateMarkup>& markup) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (markup && t.origin == HybridToken::Origin::injected) {
      out += markup->wrap(t.surface);
    } else {
      out += t.surface;
    }
    if (t.space_after && i + 1 < tokens.size()) out += ' ';
  }
  return out;
}

namespace {

// Space after token `index`, taking an enclosing multiword token into account.
bool space_after_token(const ParsedSentence& s, int index) {
  const MultiwordToken* mwt = s.multiword_at(index);
  if (mwt && mwt->last == index) return mwt->space_after();
  if (mwt) return true;
  return s.token(index).space_after();
}

}  // namespace

HybridSentence inject_source(const ParsedSentence& sentence, std::span<const FrameAssignment> assignments,
                             const Lexicon& lexicon, std::string_view target_language) {
  // first token -> (span, equivalent)
  std::map<int, std::pair<const FrameAssignment*, const LexicalUnit*>> starts;
  for (const auto& a : assignments) {
    auto eq = lexicon.equivalents_of(a.chosen_lu, target_language);
    if (eq.empty()) continue;
    starts[a.lemma_span.first()] = {&a, eq.front()};
  }

  auto overlaps_injection = [&](int first, int last) {
    for (const auto& [start, entry] : starts) {
      if (start <= last && entry.first->lemma_span.last() >= first) return true;
    }
    return false;
  };

  HybridSentence out;
  const int n = static_cast<int>(sentence.tokens.size());
  int i = 1;
  while (i <= n) {
    if (auto it = starts.find(i); it != starts.end()) {
      const auto& [assignment, equivalent] = it->second;
      const auto& span = assignment->lemma_span;
      HybridToken t;
      t.surface = equivalent->lemma;
      if (text::starts_upper(sentence.token(span.first()).form)) t.surface = text::capitalize_first(t.surface);
      t.origin = HybridToken::Origin::injected;
      t.space_after = space_after_token(sentence, span.last());
      out.tokens.push_back(std::move(t));
      out.injected_spans.push_back({span, assignment->chosen_lu, equivalent->id});
      i = span.last() + 1;
      continue;
    }
    const MultiwordToken* mwt = sentence.multiword_at(i);
    if (mwt && mwt->first == i && !overlaps_injection(mwt->first, mwt->last)) {
      out.tokens.push_back({mwt->form, HybridToken::Origin::source, mwt->space_after()});
      i = mwt->last + 1;
      continue;
    }
    out.tokens.push_back({sentence.token(i).form, HybridToken::Origin::source, space_after_token(sentence, i)});
    ++i;
  }
  return out;
}

ScyllaSResult run_scylla_s(const ParsedSentence& sentence, const Lexicon& lexicon,
                           const TranslationProvider& provider, std::string_view target_language) {
  ScyllaSResult r;
  r.analysis = analyze_sentence(sentence, lexicon);
  r.hybrid = inject_source(sentence, r.analysis.assignments, lexicon, target_language);
  const auto markup = provider.no_translate();
  r.request = r.hybrid.text(markup);

  TranslationRequest req;
  req.source_text = r.request;
  req.source_language = sentence.language;
  req.target_language = std::string(target_language);
  req.n_best = 1;
  req.copy_unknown = true;
  auto hyps = provider.translate(req);
  if (hyps.empty()) throw MalformedResponseError("provider returned no hypotheses");
  r.translation = markup ? markup->strip(hyps.front().text) : hyps.front().text;
  return r;
}

std::string translate_s(const ParsedSentence& sentence, const Lexicon& lexicon, const TranslationProvider& provider,
                        std::string_view target_language) {
  return run_scylla_s(sentence, lexicon, provider, target_language).translation;
}

}  // namespace scylla
