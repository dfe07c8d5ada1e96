// One line per acceptance criterion: PASS, FAIL or N/A. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scylla/cli.hpp"
#include "scylla/daisy.hpp"
#include "scylla/ingest.hpp"
#include "scylla/lexicon.hpp"
#include "scylla/metrics.hpp"
#include "scylla/providers.hpp"
#include "scylla/scylla_s.hpp"
#include "scylla/scylla_t.hpp"
#include "scylla/text.hpp"

using namespace scylla;

namespace {

std::string data(const std::string& rel) { return std::string(SCYLLA_DATA_DIR) + "/" + rel; }

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  if (!v.pass) ++failures;
  std::printf("%s criterion %d: %s%s%s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.empty() ? "" : " -- ",
              v.detail.c_str());
}

const Lexicon& sports() {
  static const Lexicon lex = Lexicon::load(data("fixtures/sports.lex"));
  return lex;
}

ParsedSentence fixture(const std::string& name) { return load_conllu(data("fixtures/" + name + ".conllu")).at(0); }

double ref_output(double a) { return -std::expm1(-5.0 * a) / (1.0 + std::exp(-a)); }

// --- 1 -------------------------------------------------------------------

Verdict ter_golden() {
  Verdict v;
  const std::pair<const char*, double> cases[] = {{"baseline", 26.66}, {"scylla_s", 53.33}, {"scylla_t", 20.00}};
  for (const auto& [name, expected] : cases) {
    std::ostringstream out, err;
    auto t0 = std::chrono::steady_clock::now();
    int code = run({"eval", "--metric", "ter", "--hyp", data(std::string("examples/") + name + ".txt"), "--ref",
                    data("examples/gold.txt")},
                   out, err);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(code == 0, std::string(name) + " exit " + std::to_string(code));
    auto pos = out.str().find("mean\t");
    v.require(pos != std::string::npos, std::string(name) + ": no mean line");
    if (pos == std::string::npos) continue;
    double got = std::stod(out.str().substr(pos + 5));
    v.require(std::abs(got - expected) <= 0.01 + 1e-9,
              std::string(name) + " printed " + std::to_string(got) + ", want " + std::to_string(expected));
    v.require(secs < 1.0, std::string(name) + " took " + std::to_string(secs) + " s");
    v.detail += std::string(v.detail.empty() ? "" : ", ") + name + "=" + format_truncated(got);
  }
  return v;
}

// --- 2 -------------------------------------------------------------------

Verdict hter_zero() {
  Verdict v;
  std::string hyp = "The winger is the player who has less time to think about setting up a play.";
  double h = hter(hyp, {hyp});
  v.require(h == 0.0, "hter = " + std::to_string(h));
  return v;
}

// --- 3 -------------------------------------------------------------------

Verdict disambiguation_flip() {
  Verdict v;
  const auto& lex = sports();
  auto pick = [&](const std::string& name) -> std::optional<std::pair<std::string, std::vector<std::pair<std::string, double>>>> {
    auto a = analyze_sentence(fixture(name), lex);
    for (const auto& fa : a.assignments) {
      if (fa.lemma_span.surface_lemma != "bandeja") continue;
      std::vector<std::pair<std::string, double>> scores;
      for (const auto& [lu, s] : fa.lu_scores) scores.emplace_back(lex.frame(lex.lu(lu).evokes).name, s);
      return std::make_pair(lex.frame(fa.chosen_frame).name, scores);
    }
    return std::nullopt;
  };
  for (const auto& [name, want] : std::vector<std::pair<std::string, std::string>>{{"ex1", "Winning_moves"},
                                                                                   {"ex2", "Utensils"}}) {
    auto got = pick(name);
    v.require(got.has_value(), name + ": bandeja not assigned");
    if (!got) continue;
    v.require(got->first == want, name + ": chose " + got->first);
    double best = 0.0, runner = -1.0;
    for (const auto& [f, s] : got->second) {
      if (f == want) best = s;
    }
    for (const auto& [f, s] : got->second) {
      if (f != want) runner = std::max(runner, s);
    }
    v.require(best > runner, name + ": " + want + " is not the strict argmax");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s%s %s %.4f > %.4f", v.detail.empty() ? "" : ", ", name.c_str(), want.c_str(),
                  best, runner);
    v.detail += buf;
  }
  return v;
}

// --- 4 -------------------------------------------------------------------

Verdict scylla_s_golden() {
  Verdict v;
  auto mock = MockTranslationProvider::load(data("fixtures/mock_nbest.tsv"));
  auto r = run_scylla_s(fixture("ex3"), sports(), mock, "en");
  const std::string hybrid = "O wing é o player que menos tempo tem para pensar na armação de uma play.";
  const std::string output = "The wing is the player that has less time to think in the setup of a play.";
  v.require(text::normalize_whitespace(r.hybrid.text()) == hybrid, "hybrid was: " + r.hybrid.text());
  v.require(text::normalize_whitespace(r.translation) == output, "translation was: " + r.translation);
  return v;
}

// --- 5 -------------------------------------------------------------------

Verdict scylla_t_golden() {
  Verdict v;
  auto mock = MockTranslationProvider::load(data("fixtures/mock_nbest.tsv"));
  auto dict = FileDictionary::load(data("fixtures/dictionary.tsv"));
  const auto& lex = sports();
  auto src = fixture("ex3");
  auto r = run_scylla_t(src, lex, mock, &dict, "en");
  const std::string expected = "The winger is the player who has less time to think about setting up a play.";
  // What the engine ranks first.
  const std::string baseline = "The forward is the player who has less time to think about setting up a move.";
  const std::string injected_source = "The wing is the player that has less time to think in the setup of a play.";
  v.require(r.best.candidate.text == expected, "chose: " + r.best.candidate.text);
  v.require(r.plans.front().hypothesis.text == baseline, "rank-1 hypothesis is not the baseline");
  const auto src_frames = r.source_analysis.frames();
  auto score = [&](const std::string& t) {
    return semantic_similarity(src_frames, analyze_text(t, "en", lex, &dict, src.language).frames());
  };
  long long se = score(expected), sb = score(baseline), ss = score(injected_source);
  v.require(se > sb, "score(expected)=" + std::to_string(se) + " vs baseline " + std::to_string(sb));
  v.require(r.baseline_score == sb, "reported baseline score differs");
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("S(best)=") + std::to_string(se) + " > S(baseline)=" +
              std::to_string(sb) + " (source-injection output scores " + std::to_string(ss) + ")";
  return v;
}

// --- 6 -------------------------------------------------------------------

Verdict output_fn_suite() {
  Verdict v;
  // 30-digit reference for (1 - e^-5) / (1 + e^-1).
  constexpr double kOracle = 0.726132744673969150918;
  v.require(output_fn(0.0) == 0.0, "output_fn(0) != 0");
  double o1 = output_fn(1.0);
  v.require(std::abs(o1 - kOracle) <= 1e-9, "output_fn(1) off the oracle");
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> dist(0.0, 40.0);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = dist(rng);
  std::sort(xs.begin(), xs.end());
  double prev = -1.0;
  for (double x : xs) {
    double o = output_fn(x);
    if (!(o >= prev && o >= 0.0 && o < 1.0 + 1e-15 && std::abs(o - ref_output(x)) <= 1e-12)) {
      v.require(false, "property broken at A=" + std::to_string(x));
      break;
    }
    prev = o;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "O(1)=%.10f, oracle %.10f, |diff|=%.1e; quoted 0.72612 sits %.2e away",
                o1, kOracle, std::abs(o1 - kOracle), std::abs(0.72612 - kOracle));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string(buf);
  return v;
}

// --- 7 -------------------------------------------------------------------

Verdict overlap_suite() {
  Verdict v;
  std::mt19937 rng(7);
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint32_t> xs(rng() % 8), ys(rng() % 8);
    for (auto& x : xs) x = rng() % 6;
    for (auto& y : ys) y = rng() % 6;
    FrameMultiset a, b;
    for (auto x : xs) a.add(FrameId{x});
    for (auto y : ys) b.add(FrameId{y});
    long long dbl = 0;
    for (auto x : xs) {
      for (auto y : ys) dbl += x == y;
    }
    long long prod = 0;
    for (std::uint32_t f = 0; f < 6; ++f) prod += static_cast<long long>(a.count(FrameId{f})) * b.count(FrameId{f});
    long long ab = semantic_similarity(a, b), ba = semantic_similarity(b, a);
    if (ab != ba || ab != dbl || ab != prod) {
      v.require(false, "mismatch on pair " + std::to_string(i));
      break;
    }
  }
  return v;
}

// --- 8 -------------------------------------------------------------------

// Plain recursion over incoming links, one layer rule per node kind. No
// memoization: every path is walked.
struct PathSumOracle {
  const ActivationGraph& g;

  double weighted_in(int node, const std::function<bool(const ActivationLink&)>& accept,
                     const std::function<double(int)>& level) const {
    double a = 0.0;
    for (const auto& l : g.links()) {
      if (l.target == node && accept(l)) a += ref_output(level(l.source)) * l.weight;
    }
    return a;
  }
  double word(int) const { return 1.0; }
  double lemma(int n) const {
    return weighted_in(n, [&](const ActivationLink& l) { return l.kind == LinkKind::lexical; },
                       [&](int s) { return word(s); });
  }
  double lu_base(int n) const {
    return weighted_in(n, [&](const ActivationLink& l) { return l.kind == LinkKind::lexical; },
                       [&](int s) { return lemma(s); });
  }
  double lu(int n) const {
    return lu_base(n) + weighted_in(n, [&](const ActivationLink& l) { return l.kind == LinkKind::qualia; },
                                    [&](int s) { return lu_base(s); });
  }
  double frame_base(int n) const {
    return weighted_in(n, [&](const ActivationLink& l) { return l.kind == LinkKind::evocation; },
                       [&](int s) { return lu(s); });
  }
  double frame(int n) const {
    return frame_base(n) + weighted_in(n,
                                       [&](const ActivationLink& l) {
                                         return l.kind != LinkKind::evocation && l.kind != LinkKind::lexical &&
                                                l.kind != LinkKind::qualia;
                                       },
                                       [&](int s) { return frame_base(s); });
  }
  double activation(int n) const {
    switch (g.node(n).kind) {
      case NodeKind::word_form: return word(n);
      case NodeKind::lemma: return lemma(n);
      case NodeKind::lu: return lu(n);
      case NodeKind::frame: return frame(n);
    }
    return 0.0;
  }
};

Verdict spread_oracle() {
  Verdict v;
  std::mt19937 rng(8);
  const LinkKind frame_kinds[] = {LinkKind::inheritance, LinkKind::perspective, LinkKind::subframe,
                                  LinkKind::fe_to_frame};
  int max_nodes = 0;
  double worst = 0.0;
  for (int round = 0; round < 200; ++round) {
    ActivationGraph g;
    const int nframes = 1 + static_cast<int>(rng() % 3);
    const int nspans = 1 + static_cast<int>(rng() % 2);
    std::vector<int> frames;
    for (int f = 0; f < nframes; ++f) {
      ActivationNode n;
      n.kind = NodeKind::frame;
      n.frame = FrameId{static_cast<std::uint32_t>(f)};
      frames.push_back(g.add_node(n));
    }
    std::vector<std::pair<int, int>> lus;  // node, span
    for (int s = 0; s < nspans; ++s) {
      g.spans.push_back({{s + 1}, "x", false, "x"});
      ActivationNode w;
      w.kind = NodeKind::word_form;
      w.span = s;
      ActivationNode l = w;
      l.kind = NodeKind::lemma;
      int wi = g.add_node(w), li = g.add_node(l);
      g.add_link(wi, li, LinkKind::lexical);
      for (int k = 0, nk = 1 + static_cast<int>(rng() % 2); k < nk; ++k) {
        ActivationNode u = w;
        u.kind = NodeKind::lu;
        u.lu = LuId{static_cast<std::uint32_t>(lus.size())};
        u.frame = FrameId{static_cast<std::uint32_t>(rng() % nframes)};
        int ui = g.add_node(u);
        g.add_link(li, ui, LinkKind::lexical);
        g.add_link(ui, frames[u.frame.value], LinkKind::evocation);
        lus.emplace_back(ui, s);
      }
    }
    for (const auto& a : lus) {
      for (const auto& b : lus) {
        if (a.second != b.second && rng() % 2) g.add_link(a.first, b.first, LinkKind::qualia);
      }
    }
    for (int a = 0; a < nframes; ++a) {
      for (int b = 0; b < nframes; ++b) {
        if (a != b && rng() % 2) g.add_link(frames[a], frames[b], frame_kinds[rng() % 4]);
      }
    }
    max_nodes = std::max(max_nodes, static_cast<int>(g.nodes().size()));
    spread(g);
    PathSumOracle oracle{g};
    for (std::size_t n = 0; n < g.nodes().size(); ++n) {
      double want = oracle.activation(static_cast<int>(n));
      double got = g.nodes()[n].activation;
      worst = std::max(worst, std::abs(want - got));
      if (std::abs(g.nodes()[n].output - ref_output(got)) > 1e-12) v.require(false, "stored output mismatch");
    }
  }
  v.require(max_nodes <= 12, "graph with " + std::to_string(max_nodes) + " nodes");
  v.require(worst <= 1e-9, "max deviation " + std::to_string(worst));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |spread - oracle| = %.1e, largest graph %d nodes", worst, max_nodes);
  v.detail += (v.detail.empty() ? "" : "; ") + std::string(buf);
  return v;
}

// --- 9 -------------------------------------------------------------------

Verdict optimality_oracle() {
  Verdict v;
  std::mt19937 rng(9);
  const std::vector<std::string> words{"ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen", "ibis", "jay"};
  FrameScorer scorer = [](const std::string& sentence) {
    FrameMultiset m;
    for (const auto& t : tokenize_text(sentence, "en").tokens) {
      m.add(FrameId{static_cast<std::uint32_t>(text::to_lower(t.form)[0] - 'a')});
    }
    return m;
  };
  std::size_t largest = 0;
  for (int round = 0; round < 100; ++round) {
    std::vector<HypothesisPlan> plans;
    do {
      plans.clear();
      for (int h = 0, nh = 1 + static_cast<int>(rng() % 4); h < nh; ++h) {
        HypothesisPlan p;
        std::string t;
        const int len = 2 + static_cast<int>(rng() % 5);
        for (int i = 0; i < len; ++i) t += (i ? " " : "") + words[rng() % words.size()];
        p.hypothesis = {t, h + 1, std::nullopt};
        p.tokens = tokenize_text(t, "en");
        for (int i = 1; i <= len; ++i) {
          if (rng() % 3) continue;
          InjectionPoint ip;
          ip.first = ip.last = i;
          for (int k = 0, nk = 1 + static_cast<int>(rng() % 3); k < nk; ++k) {
            std::string w = words[rng() % words.size()];
            if (std::find(ip.alternatives.begin(), ip.alternatives.end(), w) == ip.alternatives.end())
              ip.alternatives.push_back(w);
          }
          p.points.push_back(ip);
        }
        plans.push_back(std::move(p));
      }
    } while (candidate_count(plans) > 100);
    largest = std::max(largest, candidate_count(plans));

    FrameMultiset source;
    for (int k = 0; k < 5; ++k) source.add(FrameId{static_cast<std::uint32_t>(rng() % 10)});
    auto best = search_best(plans, source, scorer);

    // Brute force over the cross product of all decisions.
    long long brute = -1;
    for (std::size_t p = 0; p < plans.size(); ++p) {
      std::vector<int> d(plans[p].points.size(), -1);
      while (true) {
        auto c = render_candidate(plans[p], static_cast<int>(p), d);
        brute = std::max(brute, semantic_similarity(source, scorer(c.text)));
        std::size_t i = 0;
        for (; i < d.size(); ++i) {
          if (++d[i] < static_cast<int>(plans[p].points[i].alternatives.size())) break;
          d[i] = -1;
        }
        if (i == d.size()) break;
      }
    }
    long long rank1 = semantic_similarity(source, scorer(plans.front().hypothesis.text));
    if (best.score != brute) v.require(false, "fixture " + std::to_string(round) + " not optimal");
    if (best.score < rank1) v.require(false, "fixture " + std::to_string(round) + " below rank-1 score");
  }
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("largest fixture ") + std::to_string(largest) +
              " candidates";
  return v;
}

}  // namespace

int main() {
  report(1, "TER golden values for the baseline, source-injection and target-injection outputs", ter_golden);
  report(2, "HTER of a hypothesis against its own post-edit is 0", hter_zero);
  report(3, "bandeja flips between Winning_moves and Utensils", disambiguation_flip);
  report(4, "source-injection hybrid and translation are exact", scylla_s_golden);
  report(5, "target-injection picks the terminologically correct hypothesis with a higher frame overlap",
         scylla_t_golden);
  report(6, "output function: zero, oracle value, monotone and bounded on 10^4 points", output_fn_suite);
  report(7, "frame overlap: symmetry, product formula and double-sum oracle on 10^4 pairs", overlap_suite);
  report(8, "layered spread equals the path-sum oracle on 200 graphs", spread_oracle);
  report(9, "candidate search attains the brute-force optimum on 100 fixtures", optimality_oracle);
  std::printf(
      "N/A  criterion 10: corpus-level BLEU/TER/HTER need the private 50-sentence set, a live commercial engine "
      "and hired post-editors; not reproducible here\n");
  return failures;
}
