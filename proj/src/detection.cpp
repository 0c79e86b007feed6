#include "nuggetgen/detection.hpp"

#include <algorithm>

#include "nuggetgen/text.hpp"

namespace nuggetgen {

namespace {

constexpr const char* kRetryReminder =
    "\n\nIMPORTANT: Your previous annotation was invalid. Copy the passage text exactly, "
    "character for character, and only insert <nugget> and </nugget> tags around spans that "
    "answer the query.";

// Keeps outer spans, drops spans contained in an already kept one. Input
// sorted by (start asc, end desc), so a container always precedes its
// containees.
std::vector<InformationNugget> merge_contained(std::vector<InformationNugget> spans) {
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  std::vector<InformationNugget> kept;
  for (auto& span : spans) {
    if (!kept.empty() && span.start >= kept.back().start && span.end <= kept.back().end) continue;
    kept.push_back(std::move(span));
  }
  return kept;
}

bool should_retry(const ParseOutcome& outcome) {
  if (outcome.unbalanced_tags > 0) return true;
  return outcome.total_spans > 0 && outcome.ungrounded_spans * 2 > outcome.total_spans;
}

}  // namespace

std::string build_detection_prompt(const PromptLibrary& prompts, const Query& query,
                                   const Passage& passage) {
  return render_template(prompts.get("detect"),
                         {{"query", query.text}, {"passage", passage.text}});
}

ParseOutcome parse_annotated_passage(const Passage& original, const std::string& annotated) {
  if (annotated.empty()) throw std::invalid_argument("parse_annotated_passage: empty annotation");

  const std::string open_tag = kNuggetOpenTag;
  const std::string close_tag = kNuggetCloseTag;

  ParseOutcome outcome;
  std::vector<InformationNugget> spans;
  std::size_t pos = 0;
  bool inside = false;
  std::size_t span_start = 0;

  while (pos < annotated.size()) {
    const std::size_t next_open = annotated.find(open_tag, pos);
    const std::size_t next_close = annotated.find(close_tag, pos);
    if (next_open == std::string::npos && next_close == std::string::npos) break;

    if (next_open < next_close) {
      if (inside) {
        ++outcome.unbalanced_tags;  // nested open; abandon the current span
      }
      inside = true;
      span_start = next_open + open_tag.size();
      pos = span_start;
    } else {
      if (!inside) {
        ++outcome.unbalanced_tags;  // close without open
        pos = next_close + close_tag.size();
        continue;
      }
      const std::string span_text = annotated.substr(span_start, next_close - span_start);
      inside = false;
      pos = next_close + close_tag.size();

      if (trim(span_text).empty()) {
        ++outcome.total_spans;
        ++outcome.ungrounded_spans;
        continue;
      }
      ++outcome.total_spans;
      auto grounded = locate_nugget(original, span_text);
      if (grounded) {
        spans.push_back(std::move(*grounded));
      } else {
        ++outcome.ungrounded_spans;
      }
    }
  }
  if (inside) ++outcome.unbalanced_tags;  // open never closed

  outcome.nuggets = merge_contained(std::move(spans));
  return outcome;
}

std::vector<InformationNugget> detect_nuggets(const Query& query,
                                              const std::vector<Passage>& passages,
                                              Provider& provider, const PromptLibrary& prompts,
                                              DiagnosticLog& log,
                                              const DetectionOptions& options) {
  for (std::size_t i = 1; i < passages.size(); ++i) {
    if (passages[i].rank <= passages[i - 1].rank)
      throw std::invalid_argument("detect_nuggets: passages must be ordered by rank");
  }

  std::vector<InformationNugget> all;
  for (const auto& passage : passages) {
    const std::string base_prompt = build_detection_prompt(prompts, query, passage);

    auto attempt = [&](const std::string& prompt) -> ParseOutcome {
      GenerationRequest request;
      request.prompt = prompt;
      request.max_output_tokens = options.max_output_tokens;
      request.model_tag = options.model_tag;
      request.purpose = Purpose::Detect;
      const GenerationResult result = provider.generate(request);
      return parse_annotated_passage(passage, result.text);
    };

    ParseOutcome outcome;
    try {
      outcome = attempt(base_prompt);
    } catch (const ProviderError& e) {
      log.add(query.id, passage.id, "detect-provider-error", e.what());
      if (!options.retry_enabled) continue;
      try {
        outcome = attempt(base_prompt + kRetryReminder);
      } catch (const ProviderError& retry_error) {
        log.add(query.id, passage.id, "detect-passage-skipped", retry_error.what());
        continue;
      }
      all.insert(all.end(), outcome.nuggets.begin(), outcome.nuggets.end());
      continue;
    }

    if (options.retry_enabled && should_retry(outcome)) {
      log.add(query.id, passage.id, "detect-retry",
              "unbalanced=" + std::to_string(outcome.unbalanced_tags) +
                  " ungrounded=" + std::to_string(outcome.ungrounded_spans) + "/" +
                  std::to_string(outcome.total_spans));
      try {
        outcome = attempt(base_prompt + kRetryReminder);
      } catch (const ProviderError& e) {
        log.add(query.id, passage.id, "detect-passage-skipped", e.what());
        continue;
      }
      if (outcome.unbalanced_tags > 0 || outcome.ungrounded_spans > 0) {
        log.add(query.id, passage.id, "detect-spans-dropped",
                std::to_string(outcome.ungrounded_spans + outcome.unbalanced_tags) +
                    " failures after retry");
      }
    } else if (outcome.ungrounded_spans > 0 || outcome.unbalanced_tags > 0) {
      log.add(query.id, passage.id, "detect-spans-dropped",
              std::to_string(outcome.ungrounded_spans) + " ungrounded, " +
                  std::to_string(outcome.unbalanced_tags) + " tag errors");
    }

    all.insert(all.end(), outcome.nuggets.begin(), outcome.nuggets.end());
  }

  // Per-passage lists are start-sorted already; passages arrive rank-sorted.
  return all;
}

}  // namespace nuggetgen
