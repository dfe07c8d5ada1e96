#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scylla/daisy.hpp"
#include "scylla/providers.hpp"

namespace scylla {

struct HybridToken {
  enum class Origin { source, injected };
  std::string surface;
  Origin origin = Origin::source;
  bool space_after = true;
};

struct InjectedSpan {
  LemmaSpan span;
  LuId source_lu;
  LuId injected_lu;
};

struct HybridSentence {
  std::vector<HybridToken> tokens;
  std::vector<InjectedSpan> injected_spans;

  // Injected surfaces are wrapped in `markup` when given.
  std::string text(const std::optional<NoTranslateMarkup>& markup = std::nullopt) const;
};

// Replaces every assigned span whose chosen LU has a `target_language`
// equivalent with the first such equivalent. Everything else keeps its
// original form and spacing.
HybridSentence inject_source(const ParsedSentence& sentence, std::span<const FrameAssignment> assignments,
                             const Lexicon& lexicon, std::string_view target_language);

struct ScyllaSResult {
  SentenceAnalysis analysis;
  HybridSentence hybrid;
  std::string request;  // what was sent to the provider
  std::string translation;
};

ScyllaSResult run_scylla_s(const ParsedSentence& sentence, const Lexicon& lexicon,
                           const TranslationProvider& provider, std::string_view target_language);

std::string translate_s(const ParsedSentence& sentence, const Lexicon& lexicon, const TranslationProvider& provider,
                        std::string_view target_language);

}  // namespace scylla
