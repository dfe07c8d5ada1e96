#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scylla/ingest.hpp"
#include "scylla/lexicon.hpp"

namespace scylla {

enum class NodeKind { word_form, lemma, lu, frame };

// `lexical` covers word form -> lemma and lemma -> LU links.
enum class LinkKind { lexical, evocation, inheritance, perspective, subframe, fe_to_frame, qualia };

const char* to_string(NodeKind kind);
const char* to_string(LinkKind kind);

// Fixed weight schedule: evocation 1.0, inheritance 1.0, perspective 0.9,
// subframe 0.8, FE-to-frame 0.5, qualia 0.9; lexical links 1.0.
double link_weight(LinkKind kind);
// Link kind for a frame-to-frame relation; nullopt for relations that carry no activation.
std::optional<LinkKind> link_kind_for(FrameRelationType type);

// (1 - exp(-5 A)) / (1 + exp(-A)). Throws std::domain_error for A < 0 or non-finite A.
double output_fn(double activation);

struct ActivationNode {
  NodeKind kind = NodeKind::lemma;
  std::string payload;
  int span = -1;  // index into ActivationGraph::spans for word_form, lemma and lu nodes
  LuId lu{};
  FrameId frame{};
  bool evoked = false;  // frame nodes evoked directly by an LU in the sentence
  double activation = 0.0;
  double output = 0.0;
  double back_activation = 0.0;
};

struct ActivationLink {
  int source = 0;
  int target = 0;
  double weight = 1.0;
  LinkKind kind = LinkKind::lexical;
};

class ActivationGraph {
 public:
  int add_node(ActivationNode node);
  void add_link(int source, int target, LinkKind kind);
  void add_link(int source, int target, LinkKind kind, double weight);

  const std::vector<ActivationNode>& nodes() const { return nodes_; }
  std::vector<ActivationNode>& nodes() { return nodes_; }
  const std::vector<ActivationLink>& links() const { return links_; }
  const ActivationNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

  std::vector<int> incoming(int node) const;
  std::vector<int> outgoing(int node) const;
  std::optional<int> frame_node(FrameId frame) const;
  std::size_t count(NodeKind kind) const;

  std::vector<LemmaSpan> spans;

  // Deterministic text dump: NODE and LINK lines in insertion order.
  void dump(std::ostream& out) const;

 private:
  std::vector<ActivationNode> nodes_;
  std::vector<ActivationLink> links_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

ActivationGraph build_graph(std::span<const Cluster> clusters, const Lexicon& lexicon,
                            std::string_view language);

// Layered forward pass seeded at every word_form node with activation 1.0.
void spread(ActivationGraph& graph);

struct FrameAssignment {
  LemmaSpan lemma_span;
  FrameId chosen_frame;
  LuId chosen_lu;
  std::vector<std::pair<LuId, double>> lu_scores;  // competing senses in graph order
};

// Pushes frame activation back to the LUs and picks one sense per span. The
// lexicon supplies the domain frame list and frame names for tie-breaking.
std::vector<FrameAssignment> backpropagate_and_score(ActivationGraph& graph, const Lexicon& lexicon);

class FrameMultiset {
 public:
  FrameMultiset() = default;
  FrameMultiset(std::initializer_list<FrameId> frames);

  void add(FrameId frame, int times = 1);
  int count(FrameId frame) const;
  std::size_t size() const;  // total multiplicity
  bool empty() const { return counts_.empty(); }
  const std::map<FrameId, int>& counts() const { return counts_; }
  friend bool operator==(const FrameMultiset&, const FrameMultiset&) = default;

 private:
  std::map<FrameId, int> counts_;
};

struct SentenceAnalysis {
  std::vector<LemmaSpan> spans;
  std::vector<Cluster> clusters;
  ActivationGraph graph;
  std::vector<FrameAssignment> assignments;

  FrameMultiset frames() const;
  const FrameAssignment* assignment_for(const LemmaSpan& span) const;
};

enum class Clustering { dependency, window };

SentenceAnalysis analyze_sentence(const ParsedSentence& sentence, const Lexicon& lexicon,
                                  Clustering clustering = Clustering::dependency);
FrameMultiset frames_of_sentence(const ParsedSentence& sentence, const Lexicon& lexicon);

}  // namespace scylla
