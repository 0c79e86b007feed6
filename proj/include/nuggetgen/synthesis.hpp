#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nuggetgen/core.hpp"
#include "nuggetgen/diagnostics.hpp"
#include "nuggetgen/prompts.hpp"
#include "nuggetgen/provider.hpp"

namespace nuggetgen {

struct SynthesisOptions {
  std::string model_tag;
  int max_output_tokens = 512;
};

// Stage 4: query-biased one-sentence summary of a cluster, at most
// word_budget words as instructed in the prompt. Output longer than 1.5x the
// budget triggers one sterner retry, then a hard truncation at the last
// sentence boundary inside 1.5x the budget. Citations are the cluster's
// source passage ids by construction. Returns nullopt when the provider
// fails twice or keeps returning empty text.
std::optional<ClusterSummary> summarize_cluster(const Query& query, const FacetCluster& cluster,
                                                Provider& provider, const PromptLibrary& prompts,
                                                int word_budget, DiagnosticLog& log,
                                                const SynthesisOptions& options = {});

// Concatenates summaries in ranking order and enforces the response budget
// by dropping whole trailing summaries, never cutting mid-sentence.
GroundedResponse assemble_response(const Query& query,
                                   const std::vector<ClusterSummary>& summaries,
                                   const ResponseBudget& budget);

// Stage 5: coherence rewrite carrying citations through inline numeric
// markers. The rewrite is accepted only when the output preserves the exact
// marker set and every sentence keeps at least one marker; otherwise one
// retry, then the unrewritten response is returned bit-identically.
GroundedResponse rewrite_fluency(const GroundedResponse& response, Provider& provider,
                                 const PromptLibrary& prompts, DiagnosticLog& log,
                                 const SynthesisOptions& options = {});

enum class BaselineMode { Plain, Cot };

// Single-prompt baselines over exactly five passages. Every sentence cites
// all five passage ids; baselines have no per-sentence attribution.
GroundedResponse generate_baseline(const Query& query, const std::vector<Passage>& passages,
                                   Provider& provider, const PromptLibrary& prompts,
                                   BaselineMode mode, DiagnosticLog& log,
                                   const SynthesisOptions& options = {});

std::string build_baseline_prompt(const PromptLibrary& prompts, const Query& query,
                                  const std::vector<Passage>& passages, BaselineMode mode);

}  // namespace nuggetgen
