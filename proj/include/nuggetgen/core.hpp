#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nuggetgen {

struct Query {
  std::string id;
  std::string text;
};

struct Passage {
  std::string id;
  std::string text;
  int rank = 1;  // 1-based position in the input ranking
  double score = 0.0;
};

// Verbatim span of a source passage. The grounding invariant is that text
// equals passage.text.substr(start, end - start) exactly; nothing in the
// pipeline may construct a nugget that violates it.
struct InformationNugget {
  std::string passage_id;
  std::size_t start = 0;  // inclusive character offset
  std::size_t end = 0;    // exclusive
  std::string text;
  int passage_rank = 0;  // rank of the source passage, carried for ordering

  friend bool operator==(const InformationNugget& a, const InformationNugget& b) {
    return a.passage_id == b.passage_id && a.start == b.start && a.end == b.end &&
           a.text == b.text;
  }
};

struct FacetCluster {
  int cluster_id = 0;
  // Ordered by first appearance in the input ranking: (passage_rank, start).
  std::vector<InformationNugget> nuggets;
  std::string label;
};

struct ClusterSummary {
  int cluster_id = 0;
  std::string text;
  std::set<std::string> citations;  // exactly the cluster's source passage ids
  int word_count = 0;
};

struct ResponseSentence {
  std::string text;
  std::set<std::string> citations;

  friend bool operator==(const ResponseSentence& a, const ResponseSentence& b) {
    return a.text == b.text && a.citations == b.citations;
  }
};

struct GroundedResponse {
  std::string query_id;
  std::vector<ResponseSentence> sentences;  // empty means "no answer found"
  std::string run_tag;
  bool rewritten = false;

  friend bool operator==(const GroundedResponse& a, const GroundedResponse& b) {
    return a.query_id == b.query_id && a.sentences == b.sentences && a.run_tag == b.run_tag &&
           a.rewritten == b.rewritten;
  }
};

enum class ClustererKind { EmbeddingAgglomerative, Lsa };
enum class RankerKind { Pairwise, Bm25 };

const char* clusterer_name(ClustererKind kind);
const char* ranker_name(RankerKind kind);

struct ResponseBudget {
  enum class Kind { Sentences, Words };
  Kind kind = Kind::Sentences;
  int value = 3;

  static ResponseBudget sentences(int n) { return {Kind::Sentences, n}; }
  static ResponseBudget words(int n) { return {Kind::Words, n}; }
};

struct PipelineConfig {
  int top_k_passages = 5;
  int facet_threshold = 3;       // summaries of this many top clusters form the response
  int summary_word_budget = 35;  // per-cluster summary budget, stated in the prompt
  ResponseBudget response_budget = ResponseBudget::sentences(3);
  bool rewrite_enabled = true;
  ClustererKind clusterer = ClustererKind::EmbeddingAgglomerative;
  RankerKind ranker = RankerKind::Pairwise;
  double similarity_threshold = 0.6;
  int lsa_dims = 20;
  int max_output_tokens = 1024;
  std::size_t scorer_input_chars = 4000;  // serialized clusters are clipped before scoring

  // Top-5 inputs get a 3-sentence response; larger inputs get a 400-word cap.
  static ResponseBudget default_budget_for(int top_k);

  void validate() const;  // throws std::invalid_argument
};

// Leftmost exact-substring match of candidate_text inside the passage. When no
// exact match exists, whitespace runs are collapsed on both sides and the
// match is mapped back to original offsets, so the span still quotes the
// passage verbatim. Returns nullopt when neither strategy matches.
std::optional<InformationNugget> locate_nugget(const Passage& passage,
                                               const std::string& candidate_text);

// Number of maximal non-whitespace runs.
int count_words(const std::string& text);

std::set<std::string> citations_of(const GroundedResponse& response);

}  // namespace nuggetgen
