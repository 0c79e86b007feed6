#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nuggetgen/core.hpp"
#include "nuggetgen/diagnostics.hpp"
#include "nuggetgen/prompts.hpp"
#include "nuggetgen/provider.hpp"

namespace nuggetgen {

struct ClusterRanking {
  struct Entry {
    int cluster_id = 0;
    double score = 0.0;
  };
  std::vector<Entry> entries;  // scores non-increasing
};

// Probability-like preference that text_a answers the query better than
// text_b. Implementations may call out to a model or a fixture table.
class PairwiseScorer {
 public:
  virtual ~PairwiseScorer() = default;
  virtual double score(const Query& query, const std::string& text_a,
                       const std::string& text_b) = 0;
};

// Table-driven scorer for tests, keyed "textA|||textB". Missing pairs throw,
// which rank_pairwise degrades to an uninformative 0.5.
class ScriptedScorer : public PairwiseScorer {
 public:
  explicit ScriptedScorer(std::map<std::string, double> table);
  static ScriptedScorer from_json(const std::string& json_text);
  static ScriptedScorer from_file(const std::filesystem::path& path);

  double score(const Query& query, const std::string& text_a, const std::string& text_b) override;

 private:
  std::map<std::string, double> table_;
};

// Sequence-pair relevance served through the provider interface: prompts the
// model for a preference probability and parses the first number in the
// reply.
class ProviderScorer : public PairwiseScorer {
 public:
  ProviderScorer(Provider& provider, const PromptLibrary& prompts, std::string model_tag = "");

  double score(const Query& query, const std::string& text_a, const std::string& text_b) override;

 private:
  Provider& provider_;
  std::string template_;
  std::string model_tag_;
};

// Nugget texts joined with single spaces, in cluster-internal order.
std::string serialize_cluster(const FacetCluster& cluster);

// Checked call: throws ContractViolation when the backend value leaves [0,1].
double pairwise_score(const Query& query, const std::string& text_a, const std::string& text_b,
                      PairwiseScorer& scorer);

// Stage 3, pairwise route: aggregate_score(i) = sum over j != i of
// p(i beats j) across both orderings; sort descending with ties broken by
// best member passage rank, then cluster_id. A failing pair contributes 0.5
// in both directions.
ClusterRanking rank_pairwise(const Query& query, const std::vector<FacetCluster>& clusters,
                             PairwiseScorer& scorer, DiagnosticLog& log,
                             std::size_t scorer_input_chars = 4000);

// Stage 3, BM25 route (k1=0.9, b=0.4) over the serialized clusters of this
// query as the document collection. Same tie-break as rank_pairwise.
ClusterRanking rank_bm25(const Query& query, const std::vector<FacetCluster>& clusters);

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

// Term-by-term BM25 with +0.5-smoothed idf floored at 0; exposed so tests can
// evaluate pinned corpora directly.
double bm25_score(const std::vector<std::string>& query_tokens,
                  const std::vector<std::string>& doc_tokens,
                  const std::map<std::string, int>& doc_frequency, std::size_t collection_size,
                  double average_doc_length, const Bm25Params& params = {});

std::vector<int> select_top(const ClusterRanking& ranking, int n);

}  // namespace nuggetgen
