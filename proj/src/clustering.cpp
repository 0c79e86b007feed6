#include "nuggetgen/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "nuggetgen/text.hpp"
#include "nuggetgen/vecops.hpp"

namespace nuggetgen {

namespace {

// Content-derived sort key; makes clustering independent of input order.
using NuggetKey = std::tuple<int, std::size_t, std::size_t, std::string>;

NuggetKey key_of(const InformationNugget& nugget) {
  return {nugget.passage_rank, nugget.start, nugget.end, nugget.passage_id};
}

std::vector<std::size_t> canonical_order(const std::vector<InformationNugget>& nuggets) {
  std::vector<std::size_t> order(nuggets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key_of(nuggets[a]) < key_of(nuggets[b]);
  });
  return order;
}

std::vector<FacetCluster> singleton_fallback(const std::vector<InformationNugget>& nuggets) {
  std::vector<FacetCluster> clusters;
  clusters.reserve(nuggets.size());
  for (std::size_t i = 0; i < nuggets.size(); ++i) {
    clusters.push_back(FacetCluster{static_cast<int>(i), {nuggets[i]}, ""});
  }
  return clusters;
}

// Maps a partition over canonically ordered indices back to FacetClusters
// with the spec's ordering contracts.
std::vector<FacetCluster> build_clusters(const std::vector<InformationNugget>& nuggets,
                                         const std::vector<std::size_t>& order,
                                         const std::vector<std::vector<std::size_t>>& partition) {
  std::vector<FacetCluster> clusters;
  clusters.reserve(partition.size());
  for (const auto& group : partition) {
    FacetCluster cluster;
    for (std::size_t canonical_idx : group) {
      cluster.nuggets.push_back(nuggets[order[canonical_idx]]);
    }
    std::sort(cluster.nuggets.begin(), cluster.nuggets.end(),
              [](const auto& a, const auto& b) { return key_of(a) < key_of(b); });
    clusters.push_back(std::move(cluster));
  }
  // Order clusters by their best member; members are sorted, so that is the
  // first one.
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    return key_of(a.nuggets.front()) < key_of(b.nuggets.front());
  });
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    clusters[i].cluster_id = static_cast<int>(i);
  }
  return clusters;
}

std::vector<FacetCluster> cluster_from_vectors(const std::vector<InformationNugget>& nuggets,
                                               const std::vector<std::size_t>& order,
                                               const std::vector<std::vector<double>>& vectors,
                                               double threshold) {
  const auto similarity = cosine_similarity_matrix(vectors);
  const auto partition = agglomerate_average_linkage(similarity, threshold);
  return build_clusters(nuggets, order, partition);
}

}  // namespace

void ClusteringParams::validate() const {
  if (similarity_threshold <= 0.0 || similarity_threshold >= 1.0)
    throw std::invalid_argument("similarity_threshold must lie in (0,1)");
  if (lsa_dims < 2) throw std::invalid_argument("lsa_dims must be >= 2");
}

std::vector<std::vector<double>> cosine_similarity_matrix(
    const std::vector<std::vector<double>>& vectors) {
  const std::size_t n = vectors.size();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = std::sqrt(vecops::dot_f64(vectors[i].data(), vectors[i].data(), vectors[i].size()));
  }
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double value = 0.0;
      if (norms[i] > 0.0 && norms[j] > 0.0) {
        value = vecops::dot_f64(vectors[i].data(), vectors[j].data(), vectors[i].size()) /
                (norms[i] * norms[j]);
      }
      sim[i][j] = value;
      sim[j][i] = value;
    }
  }
  return sim;
}

std::vector<std::vector<std::size_t>> agglomerate_average_linkage(
    const std::vector<std::vector<double>>& similarity, double threshold) {
  const std::size_t n = similarity.size();
  std::vector<std::vector<std::size_t>> clusters;
  clusters.reserve(n);
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});

  while (clusters.size() > 1) {
    double best = -2.0;
    std::size_t best_a = 0;
    std::size_t best_b = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double sum = 0.0;
        for (std::size_t i : clusters[a]) {
          for (std::size_t j : clusters[b]) sum += similarity[i][j];
        }
        const double avg = sum / static_cast<double>(clusters[a].size() * clusters[b].size());
        // Strictly-greater keeps the first (smallest-indexed) pair on ties;
        // cluster lists stay ordered by smallest member throughout.
        if (avg > best) {
          best = avg;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best < threshold) break;

    std::vector<std::size_t> merged;
    merged.reserve(clusters[best_a].size() + clusters[best_b].size());
    std::merge(clusters[best_a].begin(), clusters[best_a].end(), clusters[best_b].begin(),
               clusters[best_b].end(), std::back_inserter(merged));
    clusters[best_a] = std::move(merged);
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    // Restore ordering by smallest member so tie-breaking stays canonical.
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
  }
  return clusters;
}

std::vector<FacetCluster> cluster_nuggets(const std::vector<InformationNugget>& nuggets,
                                          const ClusteringParams& params, Provider& embedder) {
  params.validate();
  if (nuggets.empty()) return {};
  if (nuggets.size() < static_cast<std::size_t>(ClusteringParams::kMinNuggetsForClustering)) {
    return singleton_fallback(nuggets);
  }

  const auto order = canonical_order(nuggets);
  std::vector<std::string> texts;
  texts.reserve(nuggets.size());
  for (std::size_t idx : order) texts.push_back(nuggets[idx].text);

  const auto embeddings = embedder.embed(texts);
  validate_embeddings(embeddings, texts.size());

  std::vector<std::vector<double>> vectors;
  vectors.reserve(embeddings.size());
  for (const auto& embedding : embeddings) {
    vectors.emplace_back(embedding.values.begin(), embedding.values.end());
  }
  return cluster_from_vectors(nuggets, order, vectors, params.similarity_threshold);
}

// ---------------------------------------------------------------------------
// LSA
// ---------------------------------------------------------------------------

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Small inputs only
// (one row per nugget); returns eigenvalues and the column eigenvector
// matrix.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
  const std::size_t n = a.size();
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-24) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = eigenvectors[k][p];
          const double vkq = eigenvectors[k][q];
          eigenvectors[k][p] = c * vkp - s * vkq;
          eigenvectors[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

}  // namespace

std::vector<std::vector<double>> lsa_document_vectors(const std::vector<std::string>& texts,
                                                      int max_dims) {
  const std::size_t docs = texts.size();

  std::map<std::string, std::size_t> vocabulary;  // sorted for determinism
  std::vector<std::vector<std::string>> doc_tokens(docs);
  for (std::size_t d = 0; d < docs; ++d) {
    doc_tokens[d] = tokenize(texts[d]);
    for (const auto& token : doc_tokens[d]) vocabulary.emplace(token, 0);
  }
  if (vocabulary.empty()) throw std::runtime_error("lsa: empty vocabulary");
  std::size_t next_id = 0;
  for (auto& [token, id] : vocabulary) id = next_id++;
  const std::size_t terms = vocabulary.size();

  std::vector<std::vector<double>> tf(docs, std::vector<double>(terms, 0.0));
  for (std::size_t d = 0; d < docs; ++d) {
    for (const auto& token : doc_tokens[d]) tf[d][vocabulary[token]] += 1.0;
  }

  // Gram matrix eigendecomposition gives the document-side factors of the
  // SVD directly: for X = U S V^T, X X^T = U S^2 U^T and the reduced document
  // vectors are rows of U_r S_r.
  std::vector<std::vector<double>> gram(docs, std::vector<double>(docs, 0.0));
  for (std::size_t i = 0; i < docs; ++i) {
    for (std::size_t j = i; j < docs; ++j) {
      const double value = vecops::dot_f64(tf[i].data(), tf[j].data(), terms);
      gram[i][j] = value;
      gram[j][i] = value;
    }
  }

  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  jacobi_eigen(gram, eigenvalues, eigenvectors);

  std::vector<std::size_t> by_value(docs);
  std::iota(by_value.begin(), by_value.end(), 0);
  std::stable_sort(by_value.begin(), by_value.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

  const double lambda_max = eigenvalues.empty() ? 0.0 : std::max(0.0, eigenvalues[by_value[0]]);
  const double tol = lambda_max * 1e-10 * static_cast<double>(std::max(docs, terms));
  std::size_t rank = 0;
  for (std::size_t k : by_value) {
    if (eigenvalues[k] > tol && eigenvalues[k] > 0.0) ++rank;
  }
  const std::size_t r = std::min<std::size_t>(static_cast<std::size_t>(max_dims), std::max<std::size_t>(rank, 1));

  std::vector<std::vector<double>> reduced(docs, std::vector<double>(r, 0.0));
  for (std::size_t c = 0; c < r; ++c) {
    const std::size_t k = by_value[c];
    const double sigma = std::sqrt(std::max(0.0, eigenvalues[k]));
    for (std::size_t d = 0; d < docs; ++d) {
      reduced[d][c] = eigenvectors[d][k] * sigma;
    }
  }
  return reduced;
}

std::vector<FacetCluster> cluster_nuggets_lsa(const std::vector<InformationNugget>& nuggets,
                                              const ClusteringParams& params) {
  params.validate();
  if (nuggets.empty()) return {};
  if (nuggets.size() < static_cast<std::size_t>(ClusteringParams::kMinNuggetsForClustering)) {
    return singleton_fallback(nuggets);
  }

  const auto order = canonical_order(nuggets);
  std::vector<std::string> texts;
  texts.reserve(nuggets.size());
  for (std::size_t idx : order) texts.push_back(nuggets[idx].text);

  const auto vectors = lsa_document_vectors(texts, params.lsa_dims);
  return cluster_from_vectors(nuggets, order, vectors, params.similarity_threshold);
}

}  // namespace nuggetgen
