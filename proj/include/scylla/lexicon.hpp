#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scylla/error.hpp"

namespace scylla {

template <class Tag>
struct StrongId {
  std::uint32_t value = 0;
  friend auto operator<=>(StrongId, StrongId) = default;
};

using FrameId = StrongId<struct FrameTag>;
using FeId = StrongId<struct FrameElementTag>;
using LuId = StrongId<struct LexicalUnitTag>;

using Language = std::string;

enum class Coreness { core, non_core };
enum class PartOfSpeech { noun, verb, adjective, adverb, other };
enum class FrameRelationType { inheritance, perspective_on, subframe, using_ };
enum class Quale { agentive, constitutive, formal, telic };

// Short tags used in the lexicon file ("n", "v", "a", "adv", "other").
const char* to_string(PartOfSpeech pos);
const char* to_string(FrameRelationType type);
const char* to_string(Quale quale);
std::optional<PartOfSpeech> parse_pos(std::string_view s);
std::optional<FrameRelationType> parse_frame_relation_type(std::string_view s);
std::optional<Quale> parse_quale(std::string_view s);

struct Frame {
  FrameId id;
  std::string key;
  std::string name;
  std::vector<FeId> frame_elements;
  std::optional<std::string> definition;
  // Part of the lexicon's declared domain frame list.
  bool domain = false;
};

struct FrameElement {
  FeId id;
  std::string key;
  std::string name;
  FrameId owner_frame;
  Coreness coreness = Coreness::core;
};

struct LexicalUnit {
  LuId id;
  std::string key;
  std::string lemma;  // multiword lemmas are space separated
  PartOfSpeech pos = PartOfSpeech::other;
  Language language;
  FrameId evokes;
  std::vector<LuId> equivalents;
};

struct FrameRelation {
  FrameRelationType type = FrameRelationType::inheritance;
  FrameId parent;
  FrameId child;
};

struct FeFrameRelation {
  FeId frame_element;
  FrameId target_frame;
};

struct TernaryQualiaRelation {
  Quale quale = Quale::formal;
  std::string relation_key;
  FrameId mediating_frame;
  FeId fe1;
  FeId fe2;
  LuId lu1;
  LuId lu2;
  std::size_t schema_index = 0;
};

struct TqrSchema {
  Quale quale = Quale::formal;
  std::string relation_key;  // "<quale>/<mnemonic>"
  std::string frame;
  std::string fe1;
  std::string fe2;
};

// The table of admissible ternary qualia relation shapes.
class TqrSchemaTable {
 public:
  static TqrSchemaTable parse(std::string_view text, const std::string& source = "<schemas>");
  static TqrSchemaTable load(const std::filesystem::path& path);
  // The 41-row table compiled into the library.
  static const TqrSchemaTable& bundled();

  std::optional<std::size_t> find(std::string_view relation_key, std::string_view frame,
                                  std::string_view fe1, std::string_view fe2) const;
  const std::vector<TqrSchema>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<TqrSchema> rows_;
};

// An immutable, fully cross-linked frame lexicon. Safe for concurrent reads.
class Lexicon {
 public:
  // Parses and validates; throws LexiconError carrying every diagnostic found.
  static Lexicon parse(std::string_view text, const std::string& source = "<lexicon>",
                       const TqrSchemaTable& schemas = TqrSchemaTable::bundled());
  static Lexicon load(const std::filesystem::path& path,
                      const TqrSchemaTable& schemas = TqrSchemaTable::bundled());

  // Collects all diagnostics instead of throwing. Empty means valid.
  static std::vector<Diagnostic> validate(std::string_view text, const std::string& source,
                                          const TqrSchemaTable& schemas = TqrSchemaTable::bundled());

  const std::string& name() const { return name_; }
  const std::vector<Frame>& frames() const { return frames_; }
  const std::vector<FrameElement>& frame_elements() const { return fes_; }
  const std::vector<LexicalUnit>& lexical_units() const { return lus_; }
  const std::vector<FrameRelation>& frame_relations() const { return frame_relations_; }
  const std::vector<FeFrameRelation>& fe_frame_relations() const { return fe_frame_relations_; }
  const std::vector<TernaryQualiaRelation>& qualia() const { return qualia_; }
  const TqrSchemaTable& schemas() const { return schemas_; }

  const Frame& frame(FrameId id) const { return frames_.at(id.value); }
  const FrameElement& frame_element(FeId id) const { return fes_.at(id.value); }
  const LexicalUnit& lu(LuId id) const;

  std::optional<FrameId> find_frame(std::string_view name) const;
  std::optional<LuId> find_lu_by_key(std::string_view key) const;
  // First LU with this lemma, POS and frame name in the language.
  std::optional<LuId> find_lu(std::string_view lemma, PartOfSpeech pos, std::string_view language,
                              std::string_view frame_name) const;

  // Case-insensitive, diacritic-preserving lemma lookup, in declaration order.
  std::vector<const LexicalUnit*> lus_for_lemma(std::string_view lemma,
                                                std::string_view language) const;
  bool has_lemma(std::string_view lemma, std::string_view language) const;

  // Relations whose {lu1, lu2} equals {a, b}. Throws UnknownLuError.
  std::vector<TernaryQualiaRelation> qualia_between(LuId a, LuId b) const;
  // Equivalents of `lu` in `target_language`, in declaration order. Throws UnknownLuError.
  std::vector<const LexicalUnit*> equivalents_of(LuId lu, std::string_view target_language) const;

  // Frame-to-frame neighbours one relation step away, in either direction.
  struct RelatedFrame {
    FrameRelationType type;
    FrameId frame;
  };
  std::vector<RelatedFrame> related_frames(FrameId frame) const;
  // Frames targeted by FE-to-frame relations from FEs of `frame`.
  std::vector<FrameId> fe_target_frames(FrameId frame) const;

  // Lowercased token sequences of every multiword lemma in the language.
  std::vector<std::vector<std::string>> multiword_lemmas(std::string_view language) const;
  std::vector<Language> languages() const;

  // "bandeja.n"
  std::string display_name(LuId lu) const;

 private:
  Lexicon() = default;
  void build_indexes();

  friend class LexiconBuilder;

  std::string name_;
  TqrSchemaTable schemas_;
  std::vector<Frame> frames_;
  std::vector<FrameElement> fes_;
  std::vector<LexicalUnit> lus_;
  std::vector<FrameRelation> frame_relations_;
  std::vector<FeFrameRelation> fe_frame_relations_;
  std::vector<TernaryQualiaRelation> qualia_;

  std::map<std::string, FrameId, std::less<>> frame_by_name_;
  std::map<std::string, LuId, std::less<>> lu_by_key_;
  // (language, lowercased lemma) -> LUs
  std::map<std::pair<std::string, std::string>, std::vector<LuId>> lus_by_lemma_;
  std::vector<std::vector<std::size_t>> qualia_by_lu_;
};

// Copies every qualia relation whose LUs are both in `from` onto the
// cross product of their equivalents in `to`.
std::vector<TernaryQualiaRelation> replicate_qualia(const Lexicon& lexicon, std::string_view from,
                                                    std::string_view to);

}  // namespace scylla
