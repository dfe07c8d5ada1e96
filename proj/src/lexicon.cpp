#include "scylla/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "scylla/text.hpp"

namespace scylla {

extern const char* const kBundledTqrSchemas;

const char* to_string(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::Kind::parse: return "parse";
    case Diagnostic::Kind::dangling_reference: return "dangling_reference";
    case Diagnostic::Kind::schema_violation: return "schema_violation";
    case Diagnostic::Kind::invariant: return "invariant";
  }
  return "unknown";
}

namespace {

std::string describe(const std::vector<Diagnostic>& diagnostics) {
  std::string msg;
  for (const auto& d : diagnostics) {
    if (!msg.empty()) msg += "\n";
    msg += d.source + ":" + std::to_string(d.line) + ": " + to_string(d.kind) + ": " + d.message;
  }
  return msg;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Record {
  std::size_t line;
  std::vector<std::string> fields;
};

// Splits into tab-separated records, dropping blank lines and comments.
std::vector<Record> records_of(std::string_view text) {
  std::vector<Record> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view stripped = text::trim(line);
    if (!stripped.empty() && stripped.front() != '#') {
      auto fields = text::split(line, '\t');
      for (auto& f : fields) f = std::string(text::trim(f));
      while (!fields.empty() && fields.back().empty()) fields.pop_back();
      out.push_back({line_no, std::move(fields)});
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

LexiconError::LexiconError(std::vector<Diagnostic> diagnostics)
    : Error(describe(diagnostics)), diagnostics_(std::move(diagnostics)) {}

const char* to_string(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::noun: return "n";
    case PartOfSpeech::verb: return "v";
    case PartOfSpeech::adjective: return "a";
    case PartOfSpeech::adverb: return "adv";
    case PartOfSpeech::other: return "other";
  }
  return "other";
}

const char* to_string(FrameRelationType type) {
  switch (type) {
    case FrameRelationType::inheritance: return "inheritance";
    case FrameRelationType::perspective_on: return "perspective_on";
    case FrameRelationType::subframe: return "subframe";
    case FrameRelationType::using_: return "using";
  }
  return "inheritance";
}

const char* to_string(Quale quale) {
  switch (quale) {
    case Quale::agentive: return "agentive";
    case Quale::constitutive: return "constitutive";
    case Quale::formal: return "formal";
    case Quale::telic: return "telic";
  }
  return "formal";
}

std::optional<PartOfSpeech> parse_pos(std::string_view s) {
  if (s == "n") return PartOfSpeech::noun;
  if (s == "v") return PartOfSpeech::verb;
  if (s == "a") return PartOfSpeech::adjective;
  if (s == "adv") return PartOfSpeech::adverb;
  if (s == "other") return PartOfSpeech::other;
  return std::nullopt;
}

std::optional<FrameRelationType> parse_frame_relation_type(std::string_view s) {
  if (s == "inheritance") return FrameRelationType::inheritance;
  if (s == "perspective_on") return FrameRelationType::perspective_on;
  if (s == "subframe") return FrameRelationType::subframe;
  if (s == "using") return FrameRelationType::using_;
  return std::nullopt;
}

std::optional<Quale> parse_quale(std::string_view s) {
  if (s == "agentive") return Quale::agentive;
  if (s == "constitutive") return Quale::constitutive;
  if (s == "formal") return Quale::formal;
  if (s == "telic") return Quale::telic;
  return std::nullopt;
}

namespace {

std::optional<Quale> quale_of_key(std::string_view relation_key) {
  auto slash = relation_key.find('/');
  if (slash == std::string_view::npos || slash + 1 >= relation_key.size()) return std::nullopt;
  return parse_quale(relation_key.substr(0, slash));
}

}  // namespace

// ---------------------------------------------------------------------------
// TQR schemas

TqrSchemaTable TqrSchemaTable::parse(std::string_view text, const std::string& source) {
  TqrSchemaTable table;
  std::vector<Diagnostic> diagnostics;
  for (const auto& rec : records_of(text)) {
    auto fail = [&](const std::string& msg) {
      diagnostics.push_back({Diagnostic::Kind::parse, source, rec.line, msg});
    };
    if (rec.fields[0] != "SCHEMA") {
      fail("unknown record tag '" + rec.fields[0] + "'");
      continue;
    }
    if (rec.fields.size() != 5) {
      fail("SCHEMA expects 4 fields, got " + std::to_string(rec.fields.size() - 1));
      continue;
    }
    auto quale = quale_of_key(rec.fields[1]);
    if (!quale) {
      fail("relation key '" + rec.fields[1] + "' must look like <quale>/<mnemonic>");
      continue;
    }
    TqrSchema row{*quale, rec.fields[1], rec.fields[2], rec.fields[3], rec.fields[4]};
    if (table.find(row.relation_key, row.frame, row.fe1, row.fe2)) {
      fail("duplicate schema " + row.relation_key + " @" + row.frame);
      continue;
    }
    table.rows_.push_back(std::move(row));
  }
  if (!diagnostics.empty()) throw LexiconError(std::move(diagnostics));
  return table;
}

TqrSchemaTable TqrSchemaTable::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

const TqrSchemaTable& TqrSchemaTable::bundled() {
  static const TqrSchemaTable table = parse(kBundledTqrSchemas, "<bundled tqr schemas>");
  return table;
}

std::optional<std::size_t> TqrSchemaTable::find(std::string_view relation_key,
                                                std::string_view frame, std::string_view fe1,
                                                std::string_view fe2) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (r.relation_key == relation_key && r.frame == frame && r.fe1 == fe1 && r.fe2 == fe2) {
      return i;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexicon loading

class LexiconBuilder {
 public:
  LexiconBuilder(std::string source, const TqrSchemaTable& schemas) : source_(std::move(source)) {
    lex_.schemas_ = schemas;
  }

  std::vector<Diagnostic> run(std::string_view text) {
    auto recs = records_of(text);
    if (recs.empty() || recs.front().fields[0] != "LEXICON") {
      report(Diagnostic::Kind::parse, recs.empty() ? 1 : recs.front().line,
             "missing LEXICON header record");
      return std::move(diagnostics_);
    }
    const auto& header = recs.front();
    if (header.fields.size() < 2 || header.fields[1] != "1") {
      report(Diagnostic::Kind::parse, header.line, "unsupported lexicon format version");
      return std::move(diagnostics_);
    }
    if (header.fields.size() >= 3) lex_.name_ = header.fields[2];

    // Declarations first, so references may point forward.
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const auto& tag = recs[i].fields[0];
      if (tag == "FRAME") declare_frame(recs[i]);
      else if (tag == "FE") fe_records_.push_back(recs[i]);
      else if (tag == "LU") declare_lu(recs[i]);
      else if (tag == "FREL" || tag == "FEREL" || tag == "TQR") deferred_.push_back(recs[i]);
      else report(Diagnostic::Kind::parse, recs[i].line, "unknown record tag '" + tag + "'");
    }
    for (const auto& rec : fe_records_) declare_fe(rec);
    for (const auto& [rec, lu] : lu_frames_) resolve_lu(rec, lu);
    for (const auto& rec : deferred_) {
      const auto& tag = rec.fields[0];
      if (tag == "FREL") add_frame_relation(rec);
      else if (tag == "FEREL") add_fe_relation(rec);
      else add_tqr(rec);
    }
    resolve_equivalents();
    check_lu_uniqueness();
    return std::move(diagnostics_);
  }

  Lexicon take() {
    lex_.build_indexes();
    return std::move(lex_);
  }

 private:
  void report(Diagnostic::Kind kind, std::size_t line, std::string message) {
    diagnostics_.push_back({kind, source_, line, std::move(message)});
  }

  bool arity(const Record& rec, std::size_t min_fields, std::size_t max_fields) {
    std::size_t n = rec.fields.size() - 1;
    if (n < min_fields || n > max_fields) {
      std::string expect = min_fields == max_fields
                               ? std::to_string(min_fields)
                               : std::to_string(min_fields) + "-" + std::to_string(max_fields);
      report(Diagnostic::Kind::parse, rec.line,
             rec.fields[0] + " expects " + expect + " fields, got " + std::to_string(n));
      return false;
    }
    return true;
  }

  std::optional<FrameId> frame_ref(const Record& rec, const std::string& key) {
    auto it = frame_by_key_.find(key);
    if (it == frame_by_key_.end()) {
      report(Diagnostic::Kind::dangling_reference, rec.line, "unknown frame id '" + key + "'");
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<FeId> fe_ref(const Record& rec, const std::string& key) {
    auto it = fe_by_key_.find(key);
    if (it == fe_by_key_.end()) {
      report(Diagnostic::Kind::dangling_reference, rec.line,
             "unknown frame element id '" + key + "'");
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<LuId> lu_ref(const Record& rec, const std::string& key) {
    auto it = lex_.lu_by_key_.find(key);
    if (it == lex_.lu_by_key_.end()) {
      report(Diagnostic::Kind::dangling_reference, rec.line,
             "unknown lexical unit id '" + key + "'");
      return std::nullopt;
    }
    return it->second;
  }

  void declare_frame(const Record& rec) {
    if (!arity(rec, 3, 4)) return;
    const auto& key = rec.fields[1];
    const auto& name = rec.fields[2];
    const auto& scope = rec.fields[3];
    if (scope != "domain" && scope != "general") {
      report(Diagnostic::Kind::parse, rec.line, "frame scope must be 'domain' or 'general'");
      return;
    }
    if (frame_by_key_.count(key)) {
      report(Diagnostic::Kind::invariant, rec.line, "duplicate frame id '" + key + "'");
      return;
    }
    if (lex_.frame_by_name_.count(name)) {
      report(Diagnostic::Kind::invariant, rec.line, "duplicate frame name '" + name + "'");
      return;
    }
    Frame f;
    f.id = FrameId{static_cast<std::uint32_t>(lex_.frames_.size())};
    f.key = key;
    f.name = name;
    f.domain = scope == "domain";
    if (rec.fields.size() == 5) f.definition = rec.fields[4];
    frame_by_key_.emplace(key, f.id);
    lex_.frame_by_name_.emplace(name, f.id);
    lex_.frames_.push_back(std::move(f));
  }

  void declare_fe(const Record& rec) {
    if (!arity(rec, 4, 4)) return;
    const auto& key = rec.fields[1];
    if (fe_by_key_.count(key)) {
      report(Diagnostic::Kind::invariant, rec.line, "duplicate frame element id '" + key + "'");
      return;
    }
    auto owner = frame_ref(rec, rec.fields[2]);
    if (!owner) return;
    Coreness coreness;
    if (rec.fields[4] == "core") coreness = Coreness::core;
    else if (rec.fields[4] == "non_core") coreness = Coreness::non_core;
    else {
      report(Diagnostic::Kind::parse, rec.line, "coreness must be 'core' or 'non_core'");
      return;
    }
    auto& frame = lex_.frames_[owner->value];
    for (FeId other : frame.frame_elements) {
      if (lex_.fes_[other.value].name == rec.fields[3]) {
        report(Diagnostic::Kind::invariant, rec.line,
               "frame element name '" + rec.fields[3] + "' repeated in frame " + frame.name);
        return;
      }
    }
    FrameElement fe;
    fe.id = FeId{static_cast<std::uint32_t>(lex_.fes_.size())};
    fe.key = key;
    fe.name = rec.fields[3];
    fe.owner_frame = *owner;
    fe.coreness = coreness;
    fe_by_key_.emplace(key, fe.id);
    frame.frame_elements.push_back(fe.id);
    lex_.fes_.push_back(std::move(fe));
  }

  void declare_lu(const Record& rec) {
    if (!arity(rec, 5, 6)) return;
    const auto& key = rec.fields[1];
    if (lex_.lu_by_key_.count(key)) {
      report(Diagnostic::Kind::invariant, rec.line, "duplicate lexical unit id '" + key + "'");
      return;
    }
    auto pos = parse_pos(rec.fields[3]);
    if (!pos) {
      report(Diagnostic::Kind::parse, rec.line, "unknown part of speech '" + rec.fields[3] + "'");
      return;
    }
    if (rec.fields[2].empty() || rec.fields[4].empty()) {
      report(Diagnostic::Kind::parse, rec.line, "LU lemma and language must be non-empty");
      return;
    }
    LexicalUnit lu;
    lu.id = LuId{static_cast<std::uint32_t>(lex_.lus_.size())};
    lu.key = key;
    lu.lemma = text::normalize_whitespace(rec.fields[2]);
    lu.pos = *pos;
    lu.language = rec.fields[4];
    lex_.lu_by_key_.emplace(key, lu.id);
    lu_frames_.emplace_back(rec, lu.id);
    lex_.lus_.push_back(std::move(lu));
  }

  void resolve_lu(const Record& rec, LuId id) {
    auto& lu = lex_.lus_[id.value];
    if (auto f = frame_ref(rec, rec.fields[5])) lu.evokes = *f;
    else dead_lus_.insert(id.value);
    if (rec.fields.size() == 7) {
      for (const auto& k : text::split(rec.fields[6], ',')) {
        std::string key(text::trim(k));
        if (key.empty()) continue;
        if (auto other = lu_ref(rec, key)) pending_equivalents_.push_back({rec.line, id, *other});
      }
    }
  }

  void add_frame_relation(const Record& rec) {
    if (!arity(rec, 3, 3)) return;
    auto type = parse_frame_relation_type(rec.fields[1]);
    if (!type) {
      report(Diagnostic::Kind::parse, rec.line, "unknown frame relation '" + rec.fields[1] + "'");
      return;
    }
    auto parent = frame_ref(rec, rec.fields[2]);
    auto child = frame_ref(rec, rec.fields[3]);
    if (!parent || !child) return;
    if (*parent == *child) {
      report(Diagnostic::Kind::invariant, rec.line, "frame relation from a frame to itself");
      return;
    }
    lex_.frame_relations_.push_back({*type, *parent, *child});
  }

  void add_fe_relation(const Record& rec) {
    if (!arity(rec, 2, 2)) return;
    auto fe = fe_ref(rec, rec.fields[1]);
    auto target = frame_ref(rec, rec.fields[2]);
    if (!fe || !target) return;
    lex_.fe_frame_relations_.push_back({*fe, *target});
  }

  void add_tqr(const Record& rec) {
    if (!arity(rec, 6, 6)) return;
    const auto& relation_key = rec.fields[1];
    auto quale = quale_of_key(relation_key);
    if (!quale) {
      report(Diagnostic::Kind::parse, rec.line,
             "relation key '" + relation_key + "' must look like <quale>/<mnemonic>");
      return;
    }
    auto frame = frame_ref(rec, rec.fields[2]);
    auto fe1 = fe_ref(rec, rec.fields[3]);
    auto fe2 = fe_ref(rec, rec.fields[4]);
    auto lu1 = lu_ref(rec, rec.fields[5]);
    auto lu2 = lu_ref(rec, rec.fields[6]);
    if (!frame || !fe1 || !fe2 || !lu1 || !lu2) return;
    const auto& mediating = lex_.frames_[frame->value];
    for (FeId fe : {*fe1, *fe2}) {
      const auto& el = lex_.fes_[fe.value];
      if (el.owner_frame != *frame) {
        report(Diagnostic::Kind::schema_violation, rec.line,
               "frame element " + el.key + " does not belong to mediating frame " + mediating.name);
        return;
      }
      if (el.coreness != Coreness::core) {
        report(Diagnostic::Kind::schema_violation, rec.line,
               "frame element " + el.name + " is not core in mediating frame " + mediating.name);
        return;
      }
    }
    const auto& fe1_name = lex_.fes_[fe1->value].name;
    const auto& fe2_name = lex_.fes_[fe2->value].name;
    auto schema = lex_.schemas_.find(relation_key, mediating.name, fe1_name, fe2_name);
    if (!schema) {
      report(Diagnostic::Kind::schema_violation, rec.line,
             "no qualia schema " + relation_key + " @" + mediating.name + "(" + fe1_name + ", " +
                 fe2_name + ")");
      return;
    }
    if (*lu1 == *lu2) {
      report(Diagnostic::Kind::invariant, rec.line, "qualia relation between an LU and itself");
      return;
    }
    lex_.qualia_.push_back({*quale, relation_key, *frame, *fe1, *fe2, *lu1, *lu2, *schema});
  }

  void resolve_equivalents() {
    for (const auto& p : pending_equivalents_) {
      auto& a = lex_.lus_[p.from.value];
      auto& b = lex_.lus_[p.to.value];
      if (a.language == b.language) {
        report(Diagnostic::Kind::invariant, p.line,
               "equivalent " + b.key + " of " + a.key + " is in the same language");
        continue;
      }
      auto add = [](LexicalUnit& x, LuId y) {
        if (std::find(x.equivalents.begin(), x.equivalents.end(), y) == x.equivalents.end()) {
          x.equivalents.push_back(y);
        }
      };
      add(a, b.id);
    }
    // Symmetric closure, appended after declared equivalents so declared order wins.
    for (const auto& p : pending_equivalents_) {
      auto& a = lex_.lus_[p.from.value];
      auto& b = lex_.lus_[p.to.value];
      if (a.language == b.language) continue;
      if (std::find(b.equivalents.begin(), b.equivalents.end(), a.id) == b.equivalents.end()) {
        b.equivalents.push_back(a.id);
      }
    }
  }

  void check_lu_uniqueness() {
    std::map<std::tuple<std::string, PartOfSpeech, std::string, std::uint32_t>, std::size_t> seen;
    for (std::size_t i = 0; i < lex_.lus_.size(); ++i) {
      if (dead_lus_.count(static_cast<std::uint32_t>(i))) continue;
      const auto& lu = lex_.lus_[i];
      auto key = std::make_tuple(text::to_lower(lu.lemma), lu.pos, lu.language, lu.evokes.value);
      auto [it, inserted] = seen.emplace(key, i);
      if (!inserted) {
        std::size_t line = 0;
        for (const auto& [rec, id] : lu_frames_) {
          if (id.value == i) line = rec.line;
        }
        report(Diagnostic::Kind::invariant, line,
               "duplicate lexical unit " + lu.lemma + "." + to_string(lu.pos) + " (" +
                   lu.language + ") evoking " + lex_.frames_[lu.evokes.value].name);
      }
    }
  }

  struct PendingEquivalent {
    std::size_t line;
    LuId from;
    LuId to;
  };

  std::string source_;
  Lexicon lex_;
  std::vector<Diagnostic> diagnostics_;
  std::map<std::string, FrameId, std::less<>> frame_by_key_;
  std::map<std::string, FeId, std::less<>> fe_by_key_;
  std::vector<Record> fe_records_;
  std::vector<Record> deferred_;
  std::vector<std::pair<Record, LuId>> lu_frames_;
  std::vector<PendingEquivalent> pending_equivalents_;
  std::set<std::uint32_t> dead_lus_;
};

Lexicon Lexicon::parse(std::string_view text, const std::string& source,
                       const TqrSchemaTable& schemas) {
  LexiconBuilder builder(source, schemas);
  auto diagnostics = builder.run(text);
  if (!diagnostics.empty()) throw LexiconError(std::move(diagnostics));
  return builder.take();
}

Lexicon Lexicon::load(const std::filesystem::path& path, const TqrSchemaTable& schemas) {
  return parse(read_file(path), path.string(), schemas);
}

std::vector<Diagnostic> Lexicon::validate(std::string_view text, const std::string& source,
                                          const TqrSchemaTable& schemas) {
  LexiconBuilder builder(source, schemas);
  return builder.run(text);
}

void Lexicon::build_indexes() {
  lus_by_lemma_.clear();
  for (const auto& lu : lus_) {
    lus_by_lemma_[{lu.language, text::to_lower(lu.lemma)}].push_back(lu.id);
  }
  qualia_by_lu_.assign(lus_.size(), {});
  for (std::size_t i = 0; i < qualia_.size(); ++i) {
    qualia_by_lu_[qualia_[i].lu1.value].push_back(i);
    qualia_by_lu_[qualia_[i].lu2.value].push_back(i);
  }
}

// ---------------------------------------------------------------------------
// Queries

const LexicalUnit& Lexicon::lu(LuId id) const {
  if (id.value >= lus_.size()) throw UnknownLuError("unknown lexical unit #" + std::to_string(id.value));
  return lus_[id.value];
}

std::optional<FrameId> Lexicon::find_frame(std::string_view name) const {
  auto it = frame_by_name_.find(name);
  if (it == frame_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<LuId> Lexicon::find_lu_by_key(std::string_view key) const {
  auto it = lu_by_key_.find(key);
  if (it == lu_by_key_.end()) return std::nullopt;
  return it->second;
}

std::optional<LuId> Lexicon::find_lu(std::string_view lemma, PartOfSpeech pos,
                                     std::string_view language,
                                     std::string_view frame_name) const {
  for (const LexicalUnit* lu : lus_for_lemma(lemma, language)) {
    if (lu->pos == pos && frames_[lu->evokes.value].name == frame_name) return lu->id;
  }
  return std::nullopt;
}

std::vector<const LexicalUnit*> Lexicon::lus_for_lemma(std::string_view lemma,
                                                       std::string_view language) const {
  std::vector<const LexicalUnit*> out;
  auto it = lus_by_lemma_.find({std::string(language), text::to_lower(text::normalize_whitespace(lemma))});
  if (it == lus_by_lemma_.end()) return out;
  for (LuId id : it->second) out.push_back(&lus_[id.value]);
  return out;
}

bool Lexicon::has_lemma(std::string_view lemma, std::string_view language) const {
  return lus_by_lemma_.count({std::string(language), text::to_lower(lemma)}) > 0;
}

std::vector<TernaryQualiaRelation> Lexicon::qualia_between(LuId a, LuId b) const {
  lu(a);
  lu(b);
  std::vector<TernaryQualiaRelation> out;
  for (std::size_t i : qualia_by_lu_[a.value]) {
    const auto& q = qualia_[i];
    if ((q.lu1 == a && q.lu2 == b) || (q.lu1 == b && q.lu2 == a)) out.push_back(q);
  }
  return out;
}

std::vector<const LexicalUnit*> Lexicon::equivalents_of(LuId id,
                                                        std::string_view target_language) const {
  const auto& source = lu(id);
  std::vector<const LexicalUnit*> out;
  for (LuId e : source.equivalents) {
    if (lus_[e.value].language == target_language) out.push_back(&lus_[e.value]);
  }
  return out;
}

std::vector<Lexicon::RelatedFrame> Lexicon::related_frames(FrameId frame) const {
  std::vector<RelatedFrame> out;
  for (const auto& r : frame_relations_) {
    if (r.parent == frame) out.push_back({r.type, r.child});
    else if (r.child == frame) out.push_back({r.type, r.parent});
  }
  return out;
}

std::vector<FrameId> Lexicon::fe_target_frames(FrameId frame) const {
  std::vector<FrameId> out;
  for (const auto& r : fe_frame_relations_) {
    if (fes_[r.frame_element.value].owner_frame == frame &&
        std::find(out.begin(), out.end(), r.target_frame) == out.end()) {
      out.push_back(r.target_frame);
    }
  }
  return out;
}

std::vector<std::vector<std::string>> Lexicon::multiword_lemmas(std::string_view language) const {
  std::set<std::vector<std::string>> seen;
  std::vector<std::vector<std::string>> out;
  for (const auto& [key, ids] : lus_by_lemma_) {
    if (key.first != language) continue;
    auto parts = text::split_whitespace(key.second);
    if (parts.size() > 1 && seen.insert(parts).second) out.push_back(std::move(parts));
  }
  return out;
}

std::vector<Language> Lexicon::languages() const {
  std::set<Language> langs;
  for (const auto& lu : lus_) langs.insert(lu.language);
  return {langs.begin(), langs.end()};
}

std::string Lexicon::display_name(LuId id) const {
  const auto& l = lu(id);
  return l.lemma + "." + to_string(l.pos);
}

std::vector<TernaryQualiaRelation> replicate_qualia(const Lexicon& lexicon, std::string_view from,
                                                    std::string_view to) {
  std::vector<TernaryQualiaRelation> out;
  for (const auto& q : lexicon.qualia()) {
    if (lexicon.lu(q.lu1).language != from || lexicon.lu(q.lu2).language != from) continue;
    auto left = lexicon.equivalents_of(q.lu1, to);
    auto right = lexicon.equivalents_of(q.lu2, to);
    for (const LexicalUnit* a : left) {
      for (const LexicalUnit* b : right) {
        TernaryQualiaRelation copy = q;
        copy.lu1 = a->id;
        copy.lu2 = b->id;
        out.push_back(copy);
      }
    }
  }
  return out;
}

}  // namespace scylla
