#pragma once

#include <string>
#include <vector>

#include "nuggetgen/core.hpp"
#include "nuggetgen/diagnostics.hpp"
#include "nuggetgen/prompts.hpp"
#include "nuggetgen/provider.hpp"

namespace nuggetgen {

inline constexpr const char* kNuggetOpenTag = "<nugget>";
inline constexpr const char* kNuggetCloseTag = "</nugget>";

struct DetectionOptions {
  std::string model_tag;
  int max_output_tokens = 2048;
  bool retry_enabled = true;
};

struct ParseOutcome {
  std::vector<InformationNugget> nuggets;
  int unbalanced_tags = 0;   // tag-structure violations in the annotation
  int ungrounded_spans = 0;  // tagged spans the original passage does not contain
  int total_spans = 0;       // tagged spans seen, grounded or not
};

std::string build_detection_prompt(const PromptLibrary& prompts, const Query& query,
                                   const Passage& passage);

// Extracts every <nugget>...</nugget> span from the annotated copy and
// grounds it against the original passage. Tag errors and grounding failures
// are counted per span; the parse keeps going. Spans contained in another
// span are merged into the containing one.
ParseOutcome parse_annotated_passage(const Passage& original, const std::string& annotated);

// Stage 1: per-passage annotation via the provider, with one retry per
// passage on unbalanced tags or when more than half of its spans fail
// grounding. Output is ordered by (passage rank, start offset).
std::vector<InformationNugget> detect_nuggets(const Query& query,
                                              const std::vector<Passage>& passages,
                                              Provider& provider, const PromptLibrary& prompts,
                                              DiagnosticLog& log,
                                              const DetectionOptions& options = {});

}  // namespace nuggetgen
