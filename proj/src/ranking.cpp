#include "nuggetgen/ranking.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nuggetgen/text.hpp"

namespace nuggetgen {

using json = nlohmann::json;

ScriptedScorer::ScriptedScorer(std::map<std::string, double> table) : table_(std::move(table)) {}

ScriptedScorer ScriptedScorer::from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  std::map<std::string, double> table;
  for (const auto& [key, value] : j.items()) table[key] = value.get<double>();
  return ScriptedScorer(std::move(table));
}

ScriptedScorer ScriptedScorer::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scorer: cannot open table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

double ScriptedScorer::score(const Query&, const std::string& text_a, const std::string& text_b) {
  const auto it = table_.find(text_a + "|||" + text_b);
  if (it == table_.end()) throw ProviderError("scripted scorer: no entry for pair");
  return it->second;
}

ProviderScorer::ProviderScorer(Provider& provider, const PromptLibrary& prompts,
                               std::string model_tag)
    : provider_(provider), template_(prompts.get("pairwise")), model_tag_(std::move(model_tag)) {}

double ProviderScorer::score(const Query& query, const std::string& text_a,
                             const std::string& text_b) {
  GenerationRequest request;
  request.prompt = render_template(
      template_, {{"query", query.text}, {"text_a", text_a}, {"text_b", text_b}});
  request.max_output_tokens = 16;
  request.model_tag = model_tag_;
  request.purpose = Purpose::Detect;  // scoring shares the generation contract
  const GenerationResult result = provider_.generate(request);

  // First parseable number in the reply.
  const std::string& text = result.text;
  std::size_t i = 0;
  while (i < text.size() && !(std::isdigit(static_cast<unsigned char>(text[i])) ||
                              text[i] == '.' || text[i] == '-')) {
    ++i;
  }
  if (i == text.size()) throw ContractViolation("pairwise backend returned no number");
  try {
    return std::stod(text.substr(i));
  } catch (const std::exception&) {
    throw ContractViolation("pairwise backend returned unparseable number");
  }
}

std::string serialize_cluster(const FacetCluster& cluster) {
  if (cluster.nuggets.empty()) throw std::invalid_argument("serialize_cluster: empty cluster");
  std::string out;
  for (std::size_t i = 0; i < cluster.nuggets.size(); ++i) {
    if (i > 0) out += ' ';
    out += cluster.nuggets[i].text;
  }
  return out;
}

double pairwise_score(const Query& query, const std::string& text_a, const std::string& text_b,
                      PairwiseScorer& scorer) {
  if (text_a.empty() || text_b.empty())
    throw std::invalid_argument("pairwise_score: empty text");
  const double value = scorer.score(query, text_a, text_b);
  if (!(value >= 0.0 && value <= 1.0))
    throw ContractViolation("pairwise score outside [0,1]");
  return value;
}

namespace {

int best_rank(const FacetCluster& cluster) {
  int best = std::numeric_limits<int>::max();
  for (const auto& nugget : cluster.nuggets) best = std::min(best, nugget.passage_rank);
  return best;
}

ClusterRanking sorted_ranking(const std::vector<FacetCluster>& clusters,
                              const std::vector<double>& scores) {
  std::vector<std::size_t> order(clusters.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> ranks(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) ranks[i] = best_rank(clusters[i]);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (ranks[a] != ranks[b]) return ranks[a] < ranks[b];
    return clusters[a].cluster_id < clusters[b].cluster_id;
  });
  ClusterRanking ranking;
  ranking.entries.reserve(clusters.size());
  for (std::size_t idx : order) {
    ranking.entries.push_back({clusters[idx].cluster_id, scores[idx]});
  }
  return ranking;
}

}  // namespace

ClusterRanking rank_pairwise(const Query& query, const std::vector<FacetCluster>& clusters,
                             PairwiseScorer& scorer, DiagnosticLog& log,
                             std::size_t scorer_input_chars) {
  if (clusters.empty()) throw std::invalid_argument("rank_pairwise: no clusters");

  std::vector<std::string> texts;
  texts.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    std::string text = serialize_cluster(cluster);
    if (text.size() > scorer_input_chars) text.resize(scorer_input_chars);
    texts.push_back(std::move(text));
  }

  const std::size_t n = clusters.size();
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (texts[i] == texts[j]) {  // identical texts are a tie by convention
        p[i][j] = 0.5;
        p[j][i] = 0.5;
        continue;
      }
      try {
        p[i][j] = pairwise_score(query, texts[i], texts[j], scorer);
        p[j][i] = pairwise_score(query, texts[j], texts[i], scorer);
      } catch (const std::exception& e) {
        p[i][j] = 0.5;
        p[j][i] = 0.5;
        log.add(query.id, "", "pairwise-scorer-failure",
                "clusters " + std::to_string(clusters[i].cluster_id) + "," +
                    std::to_string(clusters[j].cluster_id) + ": " + e.what());
      }
    }
  }

  std::vector<double> scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) scores[i] += p[i][j];
    }
  }
  return sorted_ranking(clusters, scores);
}

double bm25_score(const std::vector<std::string>& query_tokens,
                  const std::vector<std::string>& doc_tokens,
                  const std::map<std::string, int>& doc_frequency, std::size_t collection_size,
                  double average_doc_length, const Bm25Params& params) {
  if (doc_tokens.empty() || average_doc_length <= 0.0) return 0.0;

  std::map<std::string, int> tf;
  for (const auto& token : doc_tokens) ++tf[token];
  const double dl = static_cast<double>(doc_tokens.size());
  const double n_docs = static_cast<double>(collection_size);

  // Unique query terms; repeats in the query do not double-count.
  std::set<std::string> terms(query_tokens.begin(), query_tokens.end());

  double score = 0.0;
  for (const auto& term : terms) {
    const auto tf_it = tf.find(term);
    if (tf_it == tf.end()) continue;
    const auto df_it = doc_frequency.find(term);
    const double df = df_it == doc_frequency.end() ? 0.0 : static_cast<double>(df_it->second);
    const double idf = std::max(0.0, std::log((n_docs - df + 0.5) / (df + 0.5)));
    const double f = static_cast<double>(tf_it->second);
    const double norm = f + params.k1 * (1.0 - params.b + params.b * dl / average_doc_length);
    score += idf * (f * (params.k1 + 1.0)) / norm;
  }
  return score;
}

ClusterRanking rank_bm25(const Query& query, const std::vector<FacetCluster>& clusters) {
  if (clusters.empty()) throw std::invalid_argument("rank_bm25: no clusters");

  std::vector<std::vector<std::string>> docs;
  docs.reserve(clusters.size());
  for (const auto& cluster : clusters) docs.push_back(tokenize(serialize_cluster(cluster)));

  std::map<std::string, int> doc_frequency;
  double total_length = 0.0;
  for (const auto& doc : docs) {
    total_length += static_cast<double>(doc.size());
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& term : seen) ++doc_frequency[term];
  }
  const double avgdl = docs.empty() ? 0.0 : total_length / static_cast<double>(docs.size());

  const std::vector<std::string> query_tokens = tokenize(query.text);
  std::vector<double> scores(clusters.size(), 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    scores[i] = bm25_score(query_tokens, docs[i], doc_frequency, docs.size(), avgdl);
  }
  return sorted_ranking(clusters, scores);
}

std::vector<int> select_top(const ClusterRanking& ranking, int n) {
  if (n < 1) throw std::invalid_argument("select_top: n must be >= 1");
  std::vector<int> ids;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(n),
                                                  ranking.entries.size());
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ids.push_back(ranking.entries[i].cluster_id);
  return ids;
}

}  // namespace nuggetgen
