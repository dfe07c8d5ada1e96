#include "scylla/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "scylla/text.hpp"

namespace scylla {

namespace {

bool misc_has_no_space(std::string_view misc) {
  for (const auto& item : text::split(misc, '|')) {
    if (item == "SpaceAfter=No") return true;
  }
  return false;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

bool ParsedToken::space_after() const { return !misc_has_no_space(misc); }
bool MultiwordToken::space_after() const { return !misc_has_no_space(misc); }

bool LemmaSpan::contains(int index) const {
  return std::binary_search(token_indices.begin(), token_indices.end(), index);
}

const MultiwordToken* ParsedSentence::multiword_at(int index) const {
  for (const auto& m : multiword_tokens) {
    if (index >= m.first && index <= m.last) return &m;
  }
  return nullptr;
}

std::string ParsedSentence::surface() const {
  std::string out;
  int i = 1;
  const int n = static_cast<int>(tokens.size());
  while (i <= n) {
    const MultiwordToken* mwt = multiword_at(i);
    bool space;
    if (mwt != nullptr && mwt->first == i) {
      out += mwt->form;
      space = mwt->space_after();
      i = mwt->last + 1;
    } else {
      out += token(i).form;
      space = token(i).space_after();
      ++i;
    }
    if (space && i <= n) out += ' ';
  }
  return out;
}

// ---------------------------------------------------------------------------
// CoNLL-U

namespace {

class ConlluReader {
 public:
  ConlluReader(std::string_view default_language, std::string source)
      : default_language_(default_language), source_(std::move(source)) {}

  std::vector<ParsedSentence> read(std::string_view text) {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no_;
      std::string_view line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      take_line(line);
      start = end + 1;
    }
    finish();
    return std::move(sentences_);
  }

 private:
  void take_line(std::string_view line) {
    if (text::trim(line).empty()) {
      finish();
      return;
    }
    if (line.front() == '#') {
      std::string comment(line);
      current_.comments.push_back(comment);
      auto body = text::trim(line.substr(1));
      auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        auto key = text::trim(body.substr(0, eq));
        auto value = std::string(text::trim(body.substr(eq + 1)));
        if (key == "sent_id") current_.id = value;
        else if (key == "text") current_.text = value;
        else if (key == "lang") current_.language = value;
      }
      started_ = true;
      return;
    }
    auto cols = text::split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(source_, line_no_,
                       "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    }
    started_ = true;
    const std::string& id = cols[0];
    if (id.find('.') != std::string::npos) return;  // empty node
    if (auto dash = id.find('-'); dash != std::string::npos) {
      auto first = parse_int(std::string_view(id).substr(0, dash));
      auto last = parse_int(std::string_view(id).substr(dash + 1));
      if (!first || !last || *first > *last) {
        throw ParseError(source_, line_no_, "bad multiword token range '" + id + "'");
      }
      current_.multiword_tokens.push_back({*first, *last, cols[1], cols[9]});
      return;
    }
    auto index = parse_int(id);
    if (!index) throw ParseError(source_, line_no_, "bad token id '" + id + "'");
    if (*index != static_cast<int>(current_.tokens.size()) + 1) {
      throw ParseError(source_, line_no_, "token ids must be consecutive from 1");
    }
    auto head = parse_int(cols[6]);
    if (!head || *head < 0) throw ParseError(source_, line_no_, "bad head '" + cols[6] + "'");
    if (*head == *index) throw CyclicHeadError(source_, line_no_, "token " + id + " heads itself");
    ParsedToken tok;
    tok.index = *index;
    tok.form = cols[1];
    tok.lemma = cols[2];
    tok.upos = cols[3];
    tok.xpos = cols[4];
    tok.feats = cols[5];
    tok.head = *head;
    tok.deprel = cols[7];
    tok.deps = cols[8];
    tok.misc = cols[9];
    current_.tokens.push_back(std::move(tok));
    token_lines_.push_back(line_no_);
  }

  void finish() {
    if (!started_) return;
    auto& s = current_;
    const int n = static_cast<int>(s.tokens.size());
    for (int i = 0; i < n; ++i) {
      if (s.tokens[i].head > n) {
        throw ParseError(source_, token_lines_[i],
                         "head " + std::to_string(s.tokens[i].head) + " outside the sentence");
      }
    }
    for (const auto& m : s.multiword_tokens) {
      if (m.last > n) throw ParseError(source_, line_no_, "multiword token range past last token");
    }
    // Every head chain must reach the root within n steps.
    for (int i = 0; i < n; ++i) {
      int cur = i + 1;
      int steps = 0;
      while (cur != 0) {
        cur = s.tokens[cur - 1].head;
        if (++steps > n) {
          throw CyclicHeadError(source_, token_lines_[i],
                                "cyclic head chain from token " + std::to_string(i + 1));
        }
      }
    }
    if (s.language.empty()) s.language = default_language_;
    if (!s.tokens.empty()) sentences_.push_back(std::move(s));
    current_ = ParsedSentence{};
    token_lines_.clear();
    started_ = false;
  }

  std::string default_language_;
  std::string source_;
  std::size_t line_no_ = 0;
  bool started_ = false;
  ParsedSentence current_;
  std::vector<std::size_t> token_lines_;
  std::vector<ParsedSentence> sentences_;
};

}  // namespace

std::vector<ParsedSentence> parse_conllu(std::string_view text, std::string_view default_language,
                                         const std::string& source) {
  return ConlluReader(default_language, source).read(text);
}

std::vector<ParsedSentence> load_conllu(const std::string& path, std::string_view default_language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_conllu(ss.str(), default_language, path);
}

std::string to_conllu(const ParsedSentence& s) {
  std::ostringstream out;
  for (const auto& c : s.comments) out << c << '\n';
  for (const auto& t : s.tokens) {
    for (const auto& m : s.multiword_tokens) {
      if (m.first == t.index) {
        out << m.first << '-' << m.last << '\t' << m.form << "\t_\t_\t_\t_\t_\t_\t_\t" << m.misc
            << '\n';
      }
    }
    out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t' << t.xpos << '\t'
        << t.feats << '\t' << t.head << '\t' << t.deprel << '\t' << t.deps << '\t' << t.misc
        << '\n';
  }
  out << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// MWE matching

bool is_function_upos(std::string_view upos) {
  static constexpr std::string_view kExcluded[] = {"PUNCT", "DET",   "ADP",  "AUX",
                                                   "CCONJ", "SCONJ", "PRON"};
  return std::find(std::begin(kExcluded), std::end(kExcluded), upos) != std::end(kExcluded);
}

std::vector<LemmaSpan> match_mwes(const ParsedSentence& sentence, const Lexicon& lexicon) {
  const int n = static_cast<int>(sentence.tokens.size());
  std::vector<std::string> lemmas;
  lemmas.reserve(n);
  for (const auto& t : sentence.tokens) lemmas.push_back(text::to_lower(t.lemma));

  struct Match {
    int start;  // 0-based
    int length;
  };
  std::vector<Match> matches;
  for (const auto& mwe : lexicon.multiword_lemmas(sentence.language)) {
    const int m = static_cast<int>(mwe.size());
    for (int i = 0; i + m <= n; ++i) {
      if (std::equal(mwe.begin(), mwe.end(), lemmas.begin() + i)) matches.push_back({i, m});
    }
  }
  // Longest first; leftmost breaks ties.
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.start < b.start;
  });
  std::vector<bool> covered(n, false);
  std::vector<LemmaSpan> spans;
  for (const auto& m : matches) {
    bool free = true;
    for (int k = m.start; k < m.start + m.length; ++k) free = free && !covered[k];
    if (!free) continue;
    LemmaSpan span;
    std::vector<std::string> parts;
    std::vector<std::string> forms;
    for (int k = m.start; k < m.start + m.length; ++k) {
      covered[k] = true;
      span.token_indices.push_back(k + 1);
      parts.push_back(sentence.tokens[k].lemma);
      forms.push_back(sentence.tokens[k].form);
    }
    span.surface_lemma = text::join(parts, " ");
    span.surface_form = text::join(forms, " ");
    span.is_mwe = true;
    spans.push_back(std::move(span));
  }
  for (int k = 0; k < n; ++k) {
    if (covered[k] || is_function_upos(sentence.tokens[k].upos)) continue;
    spans.push_back({{k + 1}, sentence.tokens[k].lemma, false, sentence.tokens[k].form});
  }
  std::sort(spans.begin(), spans.end(),
            [](const LemmaSpan& a, const LemmaSpan& b) { return a.first() < b.first(); });
  return spans;
}

// ---------------------------------------------------------------------------
// Clustering

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::string_view base_deprel(std::string_view deprel) {
  return deprel.substr(0, deprel.find(':'));
}

bool is_argument_deprel(std::string_view deprel) {
  auto base = base_deprel(deprel);
  return base == "nsubj" || base == "obj" || base == "iobj" || base == "obl" || base == "csubj";
}

std::vector<Cluster> collect(std::span<const LemmaSpan> spans, DisjointSet& ds) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < spans.size(); ++i) groups[ds.find(static_cast<int>(i))].push_back(i);
  std::vector<std::vector<std::size_t>> ordered;
  for (auto& [root, members] : groups) ordered.push_back(std::move(members));
  auto leftmost = [&](const std::vector<std::size_t>& g) {
    int best = spans[g.front()].first();
    for (auto i : g) best = std::min(best, spans[i].first());
    return best;
  };
  std::sort(ordered.begin(), ordered.end(),
            [&](const auto& a, const auto& b) { return leftmost(a) < leftmost(b); });
  std::vector<Cluster> out;
  for (const auto& g : ordered) {
    Cluster c;
    c.id = static_cast<int>(out.size());
    for (auto i : g) c.members.push_back(spans[i]);
    std::sort(c.members.begin(), c.members.end(),
              [](const LemmaSpan& a, const LemmaSpan& b) { return a.first() < b.first(); });
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<Cluster> build_clusters(const ParsedSentence& sentence, std::span<const LemmaSpan> spans) {
  const std::size_t n = spans.size();
  DisjointSet ds(n);
  std::map<int, std::size_t> span_of_token;
  for (std::size_t i = 0; i < n; ++i) {
    for (int t : spans[i].token_indices) span_of_token[t] = i;
  }
  // The token of each span whose governor lies outside the span.
  std::vector<int> root_token(n);
  for (std::size_t i = 0; i < n; ++i) {
    root_token[i] = spans[i].first();
    for (int t : spans[i].token_indices) {
      int h = sentence.token(t).head;
      if (h == 0 || !spans[i].contains(h)) {
        root_token[i] = t;
        break;
      }
    }
  }
  std::map<int, std::vector<std::size_t>> arguments_of_verb;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tok = sentence.token(root_token[i]);
    if (tok.head == 0) continue;
    if (auto it = span_of_token.find(tok.head); it != span_of_token.end() && it->second != i) {
      ds.unite(static_cast<int>(i), static_cast<int>(it->second));
    }
    if (sentence.token(tok.head).upos == "VERB" && is_argument_deprel(tok.deprel)) {
      arguments_of_verb[tok.head].push_back(i);
    }
  }
  for (const auto& [verb, args] : arguments_of_verb) {
    for (std::size_t k = 1; k < args.size(); ++k) {
      ds.unite(static_cast<int>(args[0]), static_cast<int>(args[k]));
    }
  }
  return collect(spans, ds);
}

std::vector<Cluster> window_clusters(const ParsedSentence& sentence, std::span<const LemmaSpan> spans) {
  const std::size_t n = spans.size();
  DisjointSet ds(n);
  auto is_boundary = [&](int index) {
    const auto& form = sentence.token(index).form;
    return form == "," || form == ";" || form == ":" || form == "." || form == "!" || form == "?";
  };
  for (std::size_t i = 1; i < n; ++i) {
    bool broken = false;
    for (int t = spans[i - 1].last() + 1; t < spans[i].first(); ++t) broken = broken || is_boundary(t);
    if (!broken) ds.unite(static_cast<int>(i - 1), static_cast<int>(i));
  }
  return collect(spans, ds);
}

}  // namespace scylla
