#include "scylla/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "scylla/daisy.hpp"
#include "scylla/error.hpp"
#include "scylla/ingest.hpp"
#include "scylla/lexicon.hpp"
#include "scylla/metrics.hpp"
#include "scylla/providers.hpp"
#include "scylla/scylla_s.hpp"
#include "scylla/scylla_t.hpp"
#include "scylla/text.hpp"

namespace scylla {

using nlohmann::json;

namespace {

struct Settings {
  std::string config_path;

  std::string lexicon;
  std::string schemas;
  std::string conllu;
  std::string language = "br-pt";
  std::string dump_graph;

  std::string mode;
  std::string provider;
  std::string dictionary;
  std::string target = "en";
  int n_best = 5;
  double jw_threshold = 0.85;
  std::string trace;
  std::string out;
  int jobs = 1;

  std::string metric;
  std::string hyp;
  std::string ref;
  std::vector<std::string> post_edits;
  bool percent = true;
  std::string jsonl;
};

// Fills settings that were not given on the command line, first from
// SCYLLA_* variables and then from the --config file.
class Resolver {
 public:
  explicit Resolver(const json& config) : config_(config) {}

  void string(std::string& value, const CLI::Option* opt, const char* env, const char* key) const {
    if (opt && opt->count() > 0) return;
    if (const char* e = std::getenv(env); e && *e) {
      value = e;
    } else if (auto it = config_.find(key); it != config_.end() && it->is_string()) {
      value = it->get<std::string>();
    }
  }

  template <class T>
  void number(T& value, const CLI::Option* opt, const char* env, const char* key) const {
    if (opt && opt->count() > 0) return;
    if (const char* e = std::getenv(env); e && *e) {
      std::istringstream in(e);
      T v{};
      if (!(in >> v)) throw Error(std::string(env) + " is not a number: " + e);
      value = v;
    } else if (auto it = config_.find(key); it != config_.end() && it->is_number()) {
      value = it->get<T>();
    }
  }

 private:
  const json& config_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw Error(path + ": config must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(std::string("missing ") + what);
  if (!std::filesystem::exists(path)) throw Error(std::string(what) + " not found: " + path);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Lexicon load_lexicon(const Settings& s) {
  require_file(s.lexicon, "--lexicon");
  if (!s.schemas.empty()) {
    require_file(s.schemas, "--schemas");
    return Lexicon::load(s.lexicon, TqrSchemaTable::load(s.schemas));
  }
  return Lexicon::load(s.lexicon);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results are stored by
// index, so callers emit them in input order. The first failure by index wins.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

json tokens_json(const LemmaSpan& span) { return span.token_indices; }

// ---------------------------------------------------------------------------

int cmd_lex_validate(const Settings& s, std::ostream& out, std::ostream& err) {
  require_file(s.lexicon, "--lexicon");
  std::ifstream in(s.lexicon, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  std::optional<TqrSchemaTable> schemas;
  if (!s.schemas.empty()) {
    require_file(s.schemas, "--schemas");
    schemas = TqrSchemaTable::load(s.schemas);
  }
  const auto& table = schemas ? *schemas : TqrSchemaTable::bundled();
  auto diags = Lexicon::validate(ss.str(), s.lexicon, table);
  if (!diags.empty()) {
    for (const auto& d : diags) {
      err << d.source << ':' << d.line << ": " << to_string(d.kind) << ": " << d.message << '\n';
    }
    err << diags.size() << " problem(s)\n";
    return kExitInput;
  }
  Lexicon lex = Lexicon::parse(ss.str(), s.lexicon, table);
  out << "ok\t" << lex.name() << "\tframes=" << lex.frames().size() << "\tfes=" << lex.frame_elements().size()
      << "\tlus=" << lex.lexical_units().size() << "\tframe_relations=" << lex.frame_relations().size()
      << "\tfe_frame_relations=" << lex.fe_frame_relations().size() << "\tqualia=" << lex.qualia().size() << '\n';
  return kExitOk;
}

int cmd_daisy(const Settings& s, std::ostream& out) {
  Lexicon lex = load_lexicon(s);
  require_file(s.conllu, "--conllu");
  auto sentences = load_conllu(s.conllu, s.language);
  std::vector<SentenceAnalysis> analyses(sentences.size());
  parallel_for(sentences.size(), s.jobs, [&](std::size_t i) { analyses[i] = analyze_sentence(sentences[i], lex); });

  Output result(s.out, out);
  std::optional<std::ofstream> dump;
  if (!s.dump_graph.empty()) {
    dump.emplace(s.dump_graph, std::ios::binary);
    if (!*dump) throw Error("cannot write " + s.dump_graph);
  }
  char buf[32];
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& sent = sentences[i];
    const auto& a = analyses[i];
    result.get() << "# sent_id = " << sent.id << '\n';
    for (const auto& fa : a.assignments) {
      double score = 0.0;
      for (const auto& [lu, sc] : fa.lu_scores) {
        if (lu == fa.chosen_lu) score = sc;
      }
      std::snprintf(buf, sizeof(buf), "%.6f", score);
      std::string toks;
      for (int t : fa.lemma_span.token_indices) toks += (toks.empty() ? "" : ",") + std::to_string(t);
      result.get() << toks << '\t' << fa.lemma_span.surface_lemma << '\t' << lex.frame(fa.chosen_frame).name << '\t'
                   << lex.display_name(fa.chosen_lu) << '\t' << buf << '\n';
    }
    if (dump) {
      *dump << "# sent_id = " << sent.id << '\n';
      a.graph.dump(*dump);
    }
  }
  return kExitOk;
}

std::shared_ptr<const DictionaryProvider> maybe_dictionary(const Settings& s) {
  if (s.dictionary.empty()) return nullptr;
  require_file(s.dictionary, "--dictionary");
  return load_dictionary_provider(s.dictionary);
}

json scylla_s_trace(const ParsedSentence& sent, const ScyllaSResult& r, const Lexicon& lex) {
  json injected = json::array();
  for (const auto& sp : r.hybrid.injected_spans) {
    injected.push_back({{"tokens", tokens_json(sp.span)},
                        {"source", sp.span.surface_lemma},
                        {"source_lu", lex.display_name(sp.source_lu)},
                        {"frame", lex.frame(lex.lu(sp.source_lu).evokes).name},
                        {"injected_lu", lex.display_name(sp.injected_lu)}});
  }
  return {{"sent_id", sent.id},   {"mode", "s"},          {"hybrid", r.hybrid.text()},
          {"request", r.request}, {"injected", injected}, {"translation", r.translation}};
}

json frames_json(const FrameMultiset& m, const Lexicon& lex) {
  json out = json::array();
  for (const auto& [f, c] : m.counts()) {
    for (int k = 0; k < c; ++k) out.push_back(lex.frame(f).name);
  }
  return out;
}

json scylla_t_trace(const ParsedSentence& sent, const ScyllaTResult& r, const Lexicon& lex) {
  json hyps = json::array();
  for (std::size_t p = 0; p < r.plans.size(); ++p) {
    json aligns = json::array();
    for (const auto& a : r.alignments[p]) {
      aligns.push_back({{"target_tokens", tokens_json(a.target_span)},
                        {"target", a.target_span.surface_form},
                        {"source_tokens", tokens_json(a.source_span)},
                        {"source", a.source_span.surface_lemma},
                        {"score", a.match_score},
                        {"via", to_string(a.via)},
                        {"matched", a.back_translation + " ~ " + a.source_word}});
    }
    json points = json::array();
    for (const auto& pt : r.plans[p].points) {
      points.push_back({{"first", pt.first}, {"last", pt.last}, {"alternatives", pt.alternatives}});
    }
    hyps.push_back({{"rank", r.plans[p].hypothesis.rank},
                    {"text", r.plans[p].hypothesis.text},
                    {"alignments", aligns},
                    {"injection_points", points}});
  }
  json cands = json::array();
  for (const auto& c : r.trace) {
    cands.push_back({{"rank", c.candidate.rank},
                     {"decisions", c.candidate.decisions},
                     {"substitutions", c.candidate.substitutions},
                     {"score", c.score},
                     {"frames", frames_json(c.frames, lex)},
                     {"text", c.candidate.text}});
  }
  return {{"sent_id", sent.id},
          {"mode", "t"},
          {"source_frames", frames_json(r.source_analysis.frames(), lex)},
          {"hypotheses", hyps},
          {"candidates", cands},
          {"baseline_score", r.baseline_score},
          {"score", r.best.score},
          {"chosen_rank", r.best.candidate.rank},
          {"substitutions", r.best.candidate.substitutions},
          {"translation", r.best.candidate.text}};
}

int cmd_translate(const Settings& s, std::ostream& out) {
  if (s.mode != "s" && s.mode != "t") throw Error("--mode must be s or t");
  if (s.n_best < 1) throw Error("--n-best must be >= 1");
  if (s.jw_threshold < 0.0 || s.jw_threshold > 1.0) throw Error("--jw-threshold must be in [0, 1]");
  Lexicon lex = load_lexicon(s);
  auto langs = lex.languages();
  if (std::find(langs.begin(), langs.end(), s.target) == langs.end()) {
    throw Error("lexicon has no entries for target language " + s.target);
  }
  require_file(s.conllu, "--conllu");
  require_file(s.provider, "--provider");
  auto sentences = load_conllu(s.conllu, s.language);
  auto provider = load_translation_provider(s.provider);
  auto dictionary = maybe_dictionary(s);

  std::vector<std::string> lines(sentences.size());
  std::vector<json> traces(sentences.size());
  const bool want_trace = !s.trace.empty();
  parallel_for(sentences.size(), s.jobs, [&](std::size_t i) {
    const auto& sent = sentences[i];
    if (s.mode == "s") {
      auto r = run_scylla_s(sent, lex, *provider, s.target);
      lines[i] = r.translation;
      if (want_trace) traces[i] = scylla_s_trace(sent, r, lex);
    } else {
      ScyllaTOptions opt;
      opt.n_best = s.n_best;
      opt.jw_threshold = s.jw_threshold;
      opt.keep_trace = want_trace;
      auto r = run_scylla_t(sent, lex, *provider, dictionary.get(), s.target, opt);
      lines[i] = r.best.candidate.text;
      if (want_trace) traces[i] = scylla_t_trace(sent, r, lex);
    }
  });

  Output result(s.out, out);
  for (const auto& l : lines) result.get() << l << '\n';
  if (want_trace) {
    std::ofstream trace(s.trace, std::ios::binary);
    if (!trace) throw Error("cannot write " + s.trace);
    for (const auto& t : traces) trace << t.dump() << '\n';
  }
  return kExitOk;
}

int cmd_eval(const Settings& s, std::ostream& out) {
  require_file(s.hyp, "--hyp");
  auto hyps = read_lines(s.hyp);
  auto show = [&](double fraction) { return s.percent ? format_truncated(fraction * 100.0, 2) : format_truncated(fraction, 4); };
  std::optional<std::ofstream> jsonl;
  if (!s.jsonl.empty()) {
    jsonl.emplace(s.jsonl, std::ios::binary);
    if (!*jsonl) throw Error("cannot write " + s.jsonl);
  }

  if (s.metric == "hter") {
    if (s.post_edits.empty()) throw Error("--metric hter needs --post-edits");
    std::vector<std::vector<std::string>> edits;
    for (const auto& p : s.post_edits) {
      require_file(p, "--post-edits");
      edits.push_back(read_lines(p));
      if (edits.back().size() != hyps.size()) {
        throw Error(p + " has " + std::to_string(edits.back().size()) + " lines, expected " +
                    std::to_string(hyps.size()));
      }
    }
    if (hyps.empty()) throw EvalError("nothing to evaluate");
    double sum = 0.0;
    out << "sentence\thter\n";
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      std::vector<std::string> pe;
      for (const auto& e : edits) pe.push_back(e[i]);
      double h = hter(hyps[i], pe);
      sum += h;
      out << i + 1 << '\t' << show(h) << '\n';
      if (jsonl) *jsonl << json{{"id", std::to_string(i + 1)}, {"hter", h}}.dump() << '\n';
    }
    double mean = sum / static_cast<double>(hyps.size());
    out << "mean\t" << show(mean) << '\n';
    if (jsonl) *jsonl << json{{"summary", true}, {"hter", mean}}.dump() << '\n';
    return kExitOk;
  }

  if (s.metric != "bleu" && s.metric != "ter") throw Error("--metric must be bleu, ter or hter");
  require_file(s.ref, "--ref");
  auto refs = read_lines(s.ref);
  std::vector<std::vector<std::string>> ref_lists;
  for (auto& r : refs) ref_lists.push_back({r});
  EvalReport report = evaluate(hyps, ref_lists);

  char buf[32];
  if (s.metric == "ter") {
    out << "sentence\tter\tins\tdel\tsub\tshift\tref_len\n";
    for (const auto& p : report.per_sentence) {
      const auto& b = p.breakdown;
      out << p.id << '\t' << show(p.ter) << '\t' << b.insertions << '\t' << b.deletions << '\t' << b.substitutions
          << '\t' << b.shifts << '\t' << b.reference_length << '\n';
    }
    out << "mean\t" << show(report.mean_ter) << '\n';
  } else {
    out << "sentence\tbleu\n";
    for (const auto& p : report.per_sentence) {
      std::snprintf(buf, sizeof(buf), "%.2f", p.bleu_smoothed);
      out << p.id << '\t' << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%.2f", report.corpus_bleu);
    out << "corpus\t" << buf << '\n';
  }
  if (jsonl) {
    for (const auto& p : report.per_sentence) {
      const auto& b = p.breakdown;
      *jsonl << json{{"id", p.id},
                     {"bleu", p.bleu_smoothed},
                     {"ter", p.ter},
                     {"insertions", b.insertions},
                     {"deletions", b.deletions},
                     {"substitutions", b.substitutions},
                     {"shifts", b.shifts},
                     {"reference_length", b.reference_length}}
                    .dump()
             << '\n';
    }
    *jsonl << json{{"summary", true}, {"corpus_bleu", report.corpus_bleu}, {"mean_ter", report.mean_ter}}.dump()
           << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Frame-based terminology injection for machine translation", "scylla"};
  app.require_subcommand(1);
  app.add_option("--config", s.config_path, "JSON file with default settings");

  auto* lex = app.add_subcommand("lex", "Lexicon tools");
  lex->require_subcommand(1);
  auto* validate = lex->add_subcommand("validate", "Check a lexicon file");
  auto* v_lex = validate->add_option("--lexicon", s.lexicon, "Lexicon file");
  validate->add_option("--schemas", s.schemas, "TQR schema table (defaults to the bundled one)");

  auto* daisy = app.add_subcommand("daisy", "Assign one frame per lemma span");
  auto* d_conllu = daisy->add_option("--conllu", s.conllu, "CoNLL-U input")->required();
  auto* d_lex = daisy->add_option("--lexicon", s.lexicon, "Lexicon file");
  daisy->add_option("--schemas", s.schemas, "TQR schema table");
  daisy->add_option("--dump-graph", s.dump_graph, "Write activation graphs here");
  auto* d_lang = daisy->add_option("--lang", s.language, "Language of sentences without a '# lang' comment");
  daisy->add_option("--out", s.out, "Output file (default stdout)");
  auto* d_jobs = daisy->add_option("--jobs", s.jobs, "Worker threads");
  (void)d_conllu;

  auto* tr = app.add_subcommand("translate", "Translate with terminology injection");
  tr->add_option("--mode", s.mode, "s: inject before translation, t: after")->required()->check(CLI::IsMember({"s", "t"}));
  tr->add_option("--conllu", s.conllu, "CoNLL-U input")->required();
  auto* t_lex = tr->add_option("--lexicon", s.lexicon, "Lexicon file");
  tr->add_option("--schemas", s.schemas, "TQR schema table");
  auto* t_prov = tr->add_option("--provider", s.provider, "Translation provider config");
  auto* t_dict = tr->add_option("--dictionary", s.dictionary, "Dictionary provider config");
  auto* t_target = tr->add_option("--target", s.target, "Target language");
  auto* t_lang = tr->add_option("--lang", s.language, "Source language of sentences without a '# lang' comment");
  auto* t_nbest = tr->add_option("--n-best", s.n_best, "Hypotheses requested per sentence");
  auto* t_jw = tr->add_option("--jw-threshold", s.jw_threshold, "Jaro-Winkler acceptance threshold");
  tr->add_option("--trace", s.trace, "JSON-lines trace file");
  tr->add_option("--out", s.out, "Output file (default stdout)");
  auto* t_jobs = tr->add_option("--jobs", s.jobs, "Worker threads");

  auto* ev = app.add_subcommand("eval", "Score translations");
  ev->add_option("--metric", s.metric, "bleu, ter or hter")->required()->check(CLI::IsMember({"bleu", "ter", "hter"}));
  ev->add_option("--hyp", s.hyp, "Hypothesis file, one sentence per line")->required();
  ev->add_option("--ref", s.ref, "Reference file, line-aligned");
  ev->add_option("--post-edits", s.post_edits, "Post-edited reference files (hter)");
  auto* pct = ev->add_flag("--percent", "Show TER/HTER as percentages (default)");
  auto* frac = ev->add_flag("--fraction", "Show TER/HTER as fractions");
  pct->excludes(frac);
  ev->add_option("--jsonl", s.jsonl, "Also write per-sentence JSON lines here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().back()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = &app;
    while (!sub->get_subcommands().empty()) sub = sub->get_subcommands().front();
    err << sub->help();
    return kExitInput;
  }
  s.percent = frac->count() == 0;

  try {
    const json config = load_config(s.config_path);
    Resolver r(config);
    if (validate->parsed()) {
      r.string(s.lexicon, v_lex, "SCYLLA_LEXICON", "lexicon");
      return cmd_lex_validate(s, out, err);
    }
    if (daisy->parsed()) {
      r.string(s.lexicon, d_lex, "SCYLLA_LEXICON", "lexicon");
      r.string(s.language, d_lang, "SCYLLA_LANG", "lang");
      r.number(s.jobs, d_jobs, "SCYLLA_JOBS", "jobs");
      return cmd_daisy(s, out);
    }
    if (tr->parsed()) {
      r.string(s.lexicon, t_lex, "SCYLLA_LEXICON", "lexicon");
      r.string(s.provider, t_prov, "SCYLLA_PROVIDER", "provider");
      r.string(s.dictionary, t_dict, "SCYLLA_DICTIONARY", "dictionary");
      r.string(s.target, t_target, "SCYLLA_TARGET", "target");
      r.string(s.language, t_lang, "SCYLLA_LANG", "lang");
      r.number(s.n_best, t_nbest, "SCYLLA_N_BEST", "n_best");
      r.number(s.jw_threshold, t_jw, "SCYLLA_JW_THRESHOLD", "jw_threshold");
      r.number(s.jobs, t_jobs, "SCYLLA_JOBS", "jobs");
      return cmd_translate(s, out);
    }
    if (ev->parsed()) return cmd_eval(s, out);
  } catch (const LexiconError& e) {
    for (const auto& d : e.diagnostics()) {
      err << d.source << ':' << d.line << ": " << to_string(d.kind) << ": " << d.message << '\n';
    }
    return kExitInput;
  } catch (const TransportError& e) {
    err << "provider unreachable: " << e.what() << '\n';
    return kExitProvider;
  } catch (const ProviderError& e) {
    err << e.what() << '\n';
    return kExitProvider;
  } catch (const MalformedResponseError& e) {
    err << "bad provider response: " << e.what() << '\n';
    return kExitProvider;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  err << app.help();
  return kExitInput;
}

}  // namespace scylla
