#include "nuggetgen/core.hpp"

#include <cctype>
#include <stdexcept>

#include "nuggetgen/text.hpp"

namespace nuggetgen {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Collapses whitespace runs to single spaces and records, for every character
// of the collapsed string, its offset in the original.
struct CollapsedText {
  std::string text;
  std::vector<std::size_t> to_original;
};

CollapsedText collapse_whitespace(const std::string& s) {
  CollapsedText out;
  out.text.reserve(s.size());
  bool in_run = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_space(s[i])) {
      if (!in_run && !out.text.empty()) {
        out.text.push_back(' ');
        out.to_original.push_back(i);  // first whitespace char of the run
      }
      in_run = true;
    } else {
      out.text.push_back(s[i]);
      out.to_original.push_back(i);
      in_run = false;
    }
  }
  // Drop a trailing separator produced by trailing whitespace.
  if (!out.text.empty() && out.text.back() == ' ') {
    out.text.pop_back();
    out.to_original.pop_back();
  }
  return out;
}

InformationNugget make_span(const Passage& passage, std::size_t start, std::size_t end) {
  InformationNugget nugget;
  nugget.passage_id = passage.id;
  nugget.start = start;
  nugget.end = end;
  nugget.text = passage.text.substr(start, end - start);
  nugget.passage_rank = passage.rank;
  return nugget;
}

}  // namespace

const char* clusterer_name(ClustererKind kind) {
  return kind == ClustererKind::EmbeddingAgglomerative ? "agglomerative" : "lsa";
}

const char* ranker_name(RankerKind kind) {
  return kind == RankerKind::Pairwise ? "pairwise" : "bm25";
}

ResponseBudget PipelineConfig::default_budget_for(int top_k) {
  return top_k <= 5 ? ResponseBudget::sentences(3) : ResponseBudget::words(400);
}

void PipelineConfig::validate() const {
  if (top_k_passages < 1) throw std::invalid_argument("top_k_passages must be >= 1");
  if (facet_threshold < 1) throw std::invalid_argument("facet_threshold must be >= 1");
  if (summary_word_budget < 1) throw std::invalid_argument("summary_word_budget must be >= 1");
  if (response_budget.value < 1) throw std::invalid_argument("response budget must be positive");
  if (similarity_threshold <= 0.0 || similarity_threshold >= 1.0)
    throw std::invalid_argument("similarity_threshold must lie in (0,1)");
  if (lsa_dims < 2) throw std::invalid_argument("lsa_dims must be >= 2");
  if (max_output_tokens < 1) throw std::invalid_argument("max_output_tokens must be >= 1");
}

std::optional<InformationNugget> locate_nugget(const Passage& passage,
                                               const std::string& candidate_text) {
  if (candidate_text.empty()) throw std::invalid_argument("locate_nugget: empty candidate");

  std::size_t pos = passage.text.find(candidate_text);
  if (pos != std::string::npos) {
    return make_span(passage, pos, pos + candidate_text.size());
  }

  // Whitespace-normalized fallback: the model may have reflowed spacing.
  const CollapsedText hay = collapse_whitespace(passage.text);
  const CollapsedText needle = collapse_whitespace(candidate_text);
  if (needle.text.empty()) return std::nullopt;
  pos = hay.text.find(needle.text);
  if (pos == std::string::npos) return std::nullopt;

  const std::size_t start = hay.to_original[pos];
  const std::size_t end = hay.to_original[pos + needle.text.size() - 1] + 1;
  return make_span(passage, start, end);
}

int count_words(const std::string& text) {
  int words = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

std::set<std::string> citations_of(const GroundedResponse& response) {
  std::set<std::string> ids;
  for (const auto& sentence : response.sentences) {
    ids.insert(sentence.citations.begin(), sentence.citations.end());
  }
  return ids;
}

}  // namespace nuggetgen
