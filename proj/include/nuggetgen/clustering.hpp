#pragma once

#include <cstddef>
#include <vector>

#include "nuggetgen/core.hpp"
#include "nuggetgen/provider.hpp"

namespace nuggetgen {

struct ClusteringParams {
  ClustererKind method = ClustererKind::EmbeddingAgglomerative;
  double similarity_threshold = 0.6;  // merge while average cosine >= threshold
  int lsa_dims = 20;

  // Below this many nuggets clustering is skipped and every nugget becomes
  // its own cluster.
  static constexpr int kMinNuggetsForClustering = 4;

  void validate() const;
};

// Average-linkage agglomeration over a precomputed similarity matrix. Merges
// the pair with the highest average cross similarity while it stays >= the
// threshold; ties pick the pair with the smallest (min member, max member)
// indices. Returns the partition as sorted member-index lists, ordered by
// smallest member.
std::vector<std::vector<std::size_t>> agglomerate_average_linkage(
    const std::vector<std::vector<double>>& similarity, double threshold);

std::vector<std::vector<double>> cosine_similarity_matrix(
    const std::vector<std::vector<double>>& vectors);

// Stage 2 over provider embeddings. Fewer than kMinNuggetsForClustering
// nuggets yield singleton clusters in input order; otherwise the partition
// comes from agglomerate_average_linkage over embedding cosines. Clusters are
// ordered by their best (lowest) source passage rank, members by
// (passage rank, start offset), and cluster_ids run 0..k-1 in that order.
std::vector<FacetCluster> cluster_nuggets(const std::vector<InformationNugget>& nuggets,
                                          const ClusteringParams& params, Provider& embedder);

// LSA variant: term-frequency matrix over the nugget texts (lowercased,
// punctuation stripped), truncated SVD to min(lsa_dims, rank) dimensions,
// then the same agglomeration. Contracts identical to cluster_nuggets.
std::vector<FacetCluster> cluster_nuggets_lsa(const std::vector<InformationNugget>& nuggets,
                                              const ClusteringParams& params);

// Reduced document vectors used by the LSA path, exposed for tests: rows are
// documents, columns the top singular directions scaled by singular value.
std::vector<std::vector<double>> lsa_document_vectors(const std::vector<std::string>& texts,
                                                      int max_dims);

}  // namespace nuggetgen
