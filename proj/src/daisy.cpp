#include "scylla/daisy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace scylla {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::word_form: return "word_form";
    case NodeKind::lemma: return "lemma";
    case NodeKind::lu: return "lu";
    case NodeKind::frame: return "frame";
  }
  return "?";
}

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::lexical: return "lexical";
    case LinkKind::evocation: return "evocation";
    case LinkKind::inheritance: return "inheritance";
    case LinkKind::perspective: return "perspective";
    case LinkKind::subframe: return "subframe";
    case LinkKind::fe_to_frame: return "fe_to_frame";
    case LinkKind::qualia: return "qualia";
  }
  return "?";
}

double link_weight(LinkKind kind) {
  switch (kind) {
    case LinkKind::lexical: return 1.0;
    case LinkKind::evocation: return 1.0;
    case LinkKind::inheritance: return 1.0;
    case LinkKind::perspective: return 0.9;
    case LinkKind::subframe: return 0.8;
    case LinkKind::fe_to_frame: return 0.5;
    case LinkKind::qualia: return 0.9;
  }
  return 0.0;
}

std::optional<LinkKind> link_kind_for(FrameRelationType type) {
  switch (type) {
    case FrameRelationType::inheritance: return LinkKind::inheritance;
    case FrameRelationType::perspective_on: return LinkKind::perspective;
    case FrameRelationType::subframe: return LinkKind::subframe;
    case FrameRelationType::using_: return std::nullopt;
  }
  return std::nullopt;
}

double output_fn(double activation) {
  if (!std::isfinite(activation) || activation < 0.0) {
    throw std::domain_error("output_fn: activation must be finite and non-negative");
  }
  // -expm1 keeps precision for small activations.
  return -std::expm1(-5.0 * activation) / (1.0 + std::exp(-activation));
}

// ---------------------------------------------------------------------------
// Graph container

int ActivationGraph::add_node(ActivationNode node) {
  nodes_.push_back(std::move(node));
  in_.emplace_back();
  out_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

void ActivationGraph::add_link(int source, int target, LinkKind kind) {
  add_link(source, target, kind, link_weight(kind));
}

void ActivationGraph::add_link(int source, int target, LinkKind kind, double weight) {
  int id = static_cast<int>(links_.size());
  links_.push_back({source, target, weight, kind});
  out_.at(source).push_back(id);
  in_.at(target).push_back(id);
}

std::vector<int> ActivationGraph::incoming(int node) const { return in_.at(node); }
std::vector<int> ActivationGraph::outgoing(int node) const { return out_.at(node); }

std::optional<int> ActivationGraph::frame_node(FrameId frame) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == NodeKind::frame && nodes_[i].frame == frame) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::size_t ActivationGraph::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const auto& n) { return n.kind == kind; }));
}

void ActivationGraph::dump(std::ostream& out) const {
  char buf[128];
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    std::snprintf(buf, sizeof(buf), "%.9f\t%.9f\t%.9f", n.activation, n.output, n.back_activation);
    out << "NODE\t" << i << '\t' << to_string(n.kind) << '\t' << n.payload << '\t' << buf << '\n';
  }
  for (const auto& l : links_) {
    std::snprintf(buf, sizeof(buf), "%.3f", l.weight);
    out << "LINK\t" << l.source << '\t' << l.target << '\t' << to_string(l.kind) << '\t' << buf
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Construction

ActivationGraph build_graph(std::span<const Cluster> clusters, const Lexicon& lexicon,
                            std::string_view language) {
  ActivationGraph g;
  std::vector<int> cluster_of_span;
  for (const auto& c : clusters) {
    for (const auto& m : c.members) {
      g.spans.push_back(m);
      cluster_of_span.push_back(c.id);
    }
  }

  struct LuNode {
    int node;
    int span;
    LuId lu;
  };
  std::vector<LuNode> lu_nodes;
  std::map<FrameId, int> frame_nodes;
  auto frame_node = [&](FrameId f) {
    auto it = frame_nodes.find(f);
    if (it != frame_nodes.end()) return it->second;
    ActivationNode n;
    n.kind = NodeKind::frame;
    n.payload = lexicon.frame(f).name;
    n.frame = f;
    int id = g.add_node(std::move(n));
    frame_nodes.emplace(f, id);
    return id;
  };

  // word form -> lemma -> LU -> evoked frame
  for (std::size_t s = 0; s < g.spans.size(); ++s) {
    const auto& span = g.spans[s];
    ActivationNode wf;
    wf.kind = NodeKind::word_form;
    wf.payload = span.surface_form.empty() ? span.surface_lemma : span.surface_form;
    wf.span = static_cast<int>(s);
    int wf_id = g.add_node(std::move(wf));

    ActivationNode lemma;
    lemma.kind = NodeKind::lemma;
    lemma.payload = span.surface_lemma;
    lemma.span = static_cast<int>(s);
    int lemma_id = g.add_node(std::move(lemma));
    g.add_link(wf_id, lemma_id, LinkKind::lexical);

    for (const LexicalUnit* lu : lexicon.lus_for_lemma(span.surface_lemma, language)) {
      ActivationNode n;
      n.kind = NodeKind::lu;
      n.payload = lexicon.display_name(lu->id) + "@" + lexicon.frame(lu->evokes).name;
      n.span = static_cast<int>(s);
      n.lu = lu->id;
      n.frame = lu->evokes;
      int lu_id = g.add_node(std::move(n));
      g.add_link(lemma_id, lu_id, LinkKind::lexical);
      lu_nodes.push_back({lu_id, static_cast<int>(s), lu->id});
    }
  }
  for (const auto& ln : lu_nodes) {
    int f = frame_node(lexicon.lu(ln.lu).evokes);
    g.nodes()[f].evoked = true;
    g.add_link(ln.node, f, LinkKind::evocation);
  }

  // Qualia between LUs of different spans in the same cluster.
  for (std::size_t i = 0; i < lu_nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < lu_nodes.size(); ++j) {
      const auto& a = lu_nodes[i];
      const auto& b = lu_nodes[j];
      if (a.span == b.span || cluster_of_span[a.span] != cluster_of_span[b.span]) continue;
      for (std::size_t k = 0; k < lexicon.qualia_between(a.lu, b.lu).size(); ++k) {
        g.add_link(a.node, b.node, LinkKind::qualia);
        g.add_link(b.node, a.node, LinkKind::qualia);
      }
    }
  }

  // FE-to-frame links between frames evoked within one cluster.
  std::map<int, std::set<FrameId>> frames_in_cluster;
  for (const auto& ln : lu_nodes) {
    frames_in_cluster[cluster_of_span[ln.span]].insert(lexicon.lu(ln.lu).evokes);
  }
  std::set<std::pair<FrameId, FrameId>> fe_links;
  for (const auto& [cluster, frames] : frames_in_cluster) {
    for (FrameId f : frames) {
      for (FrameId target : lexicon.fe_target_frames(f)) {
        if (target == f || !frames.count(target)) continue;
        if (fe_links.insert({f, target}).second) {
          g.add_link(frame_nodes.at(f), frame_nodes.at(target), LinkKind::fe_to_frame);
        }
      }
    }
  }

  // Frames one relation step away from each evoked frame.
  std::vector<FrameId> evoked;
  for (const auto& [f, node] : frame_nodes) evoked.push_back(f);
  std::set<std::tuple<FrameId, FrameId, LinkKind>> rel_links;
  for (FrameId f : evoked) {
    for (const auto& rel : lexicon.related_frames(f)) {
      auto kind = link_kind_for(rel.type);
      if (!kind || rel.frame == f) continue;
      if (!rel_links.insert({f, rel.frame, *kind}).second) continue;
      int target = frame_node(rel.frame);
      g.add_link(frame_nodes.at(f), target, *kind);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Spread and backpropagation

namespace {

bool is_frame_link(LinkKind k) {
  return k == LinkKind::inheritance || k == LinkKind::perspective || k == LinkKind::subframe ||
         k == LinkKind::fe_to_frame;
}

}  // namespace

void spread(ActivationGraph& graph) {
  auto& nodes = graph.nodes();
  const auto& links = graph.links();
  const std::size_t n = nodes.size();
  for (auto& node : nodes) {
    node.activation = 0.0;
    node.output = 0.0;
    node.back_activation = 0.0;
  }
  auto sum_in = [&](std::size_t target, auto&& accept, const std::vector<double>& source_level) {
    double a = 0.0;
    for (int id : graph.incoming(static_cast<int>(target))) {
      const auto& l = links[id];
      if (accept(l)) a += output_fn(source_level[l.source]) * l.weight;
    }
    return a;
  };

  std::vector<double> level(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind == NodeKind::word_form) level[i] = 1.0;
  }
  auto from_kind = [&](NodeKind k, LinkKind lk) {
    return [&, k, lk](const ActivationLink& l) { return l.kind == lk && nodes[l.source].kind == k; };
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind == NodeKind::lemma) level[i] = sum_in(i, from_kind(NodeKind::word_form, LinkKind::lexical), level);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind == NodeKind::lu) level[i] = sum_in(i, from_kind(NodeKind::lemma, LinkKind::lexical), level);
  }
  // Qualia re-fire from the LU activations before any qualia contribution.
  std::vector<double> lu_base = level;
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind == NodeKind::lu) level[i] += sum_in(i, from_kind(NodeKind::lu, LinkKind::qualia), lu_base);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind == NodeKind::frame) level[i] = sum_in(i, from_kind(NodeKind::lu, LinkKind::evocation), level);
  }
  std::vector<double> frame_base = level;
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind != NodeKind::frame) continue;
    level[i] += sum_in(i, [&](const ActivationLink& l) { return is_frame_link(l.kind); }, frame_base);
  }
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].activation = level[i];
    nodes[i].output = output_fn(level[i]);
  }
}

std::vector<FrameAssignment> backpropagate_and_score(ActivationGraph& graph, const Lexicon& lexicon) {
  auto& nodes = graph.nodes();
  const auto& links = graph.links();
  const std::size_t n = nodes.size();

  // Frames: own level plus what flows back over their outgoing frame links.
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind != NodeKind::frame) continue;
    double b = nodes[i].activation;
    for (int id : graph.outgoing(static_cast<int>(i))) {
      const auto& l = links[id];
      if (is_frame_link(l.kind)) b += output_fn(nodes[l.target].activation) * l.weight;
    }
    nodes[i].back_activation = b;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind != NodeKind::lu) continue;
    double r = 0.0;
    for (int id : graph.outgoing(static_cast<int>(i))) {
      const auto& l = links[id];
      if (l.kind == LinkKind::evocation) r += output_fn(nodes[l.target].back_activation) * l.weight;
    }
    nodes[i].back_activation = r;
  }

  std::map<int, std::vector<int>> lus_of_span;
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].kind == NodeKind::lu) lus_of_span[nodes[i].span].push_back(static_cast<int>(i));
  }
  std::vector<FrameAssignment> out;
  for (const auto& [span, candidates] : lus_of_span) {
    FrameAssignment a;
    a.lemma_span = graph.spans.at(span);
    const double divisor = static_cast<double>(candidates.size());
    int best = -1;
    double best_score = 0.0;
    for (int c : candidates) {
      double score = nodes[c].back_activation / divisor;
      a.lu_scores.emplace_back(nodes[c].lu, score);
      if (best < 0) {
        best = c;
        best_score = score;
        continue;
      }
      const double tol = 1e-12 * std::max(1.0, std::abs(best_score));
      if (score > best_score + tol) {
        best = c;
        best_score = score;
      } else if (std::abs(score - best_score) <= tol) {
        const auto& cur = lexicon.frame(nodes[best].frame);
        const auto& cand = lexicon.frame(nodes[c].frame);
        bool better = false;
        if (cand.domain != cur.domain) better = cand.domain;
        else if (cand.name != cur.name) better = cand.name < cur.name;
        else better = nodes[c].lu < nodes[best].lu;
        if (better) {
          best = c;
          best_score = score;
        }
      }
    }
    a.chosen_lu = nodes[best].lu;
    a.chosen_frame = nodes[best].frame;
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const FrameAssignment& x, const FrameAssignment& y) {
    return x.lemma_span.first() < y.lemma_span.first();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Frame multisets and the composed pipeline

FrameMultiset::FrameMultiset(std::initializer_list<FrameId> frames) {
  for (FrameId f : frames) add(f);
}

void FrameMultiset::add(FrameId frame, int times) {
  if (times <= 0) return;
  counts_[frame] += times;
}

int FrameMultiset::count(FrameId frame) const {
  auto it = counts_.find(frame);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t FrameMultiset::size() const {
  std::size_t total = 0;
  for (const auto& [f, c] : counts_) total += static_cast<std::size_t>(c);
  return total;
}

FrameMultiset SentenceAnalysis::frames() const {
  FrameMultiset m;
  for (const auto& a : assignments) m.add(a.chosen_frame);
  return m;
}

const FrameAssignment* SentenceAnalysis::assignment_for(const LemmaSpan& span) const {
  for (const auto& a : assignments) {
    if (a.lemma_span.token_indices == span.token_indices) return &a;
  }
  return nullptr;
}

SentenceAnalysis analyze_sentence(const ParsedSentence& sentence, const Lexicon& lexicon,
                                  Clustering clustering) {
  SentenceAnalysis out;
  out.spans = match_mwes(sentence, lexicon);
  out.clusters = clustering == Clustering::dependency ? build_clusters(sentence, out.spans)
                                                      : window_clusters(sentence, out.spans);
  out.graph = build_graph(out.clusters, lexicon, sentence.language);
  spread(out.graph);
  out.assignments = backpropagate_and_score(out.graph, lexicon);
  return out;
}

FrameMultiset frames_of_sentence(const ParsedSentence& sentence, const Lexicon& lexicon) {
  return analyze_sentence(sentence, lexicon).frames();
}

}  // namespace scylla
