#include "nuggetgen/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "nuggetgen/text.hpp"

namespace nuggetgen {

namespace {

constexpr const char* kSummaryRetryReminder =
    "\n\nIMPORTANT: Your previous summary was too long. The word limit is strict; answer with "
    "exactly one short sentence.";

constexpr const char* kRewriteRetryReminder =
    "\n\nIMPORTANT: Your previous rewrite was invalid. Keep every citation marker exactly as "
    "given, at least one per sentence, and do not add or remove markers.";

std::string nugget_block(const FacetCluster& cluster) {
  std::string block;
  for (const auto& nugget : cluster.nuggets) {
    block += "- ";
    block += nugget.text;
    block += '\n';
  }
  return block;
}

// Longest prefix of whole sentences within max_words; if even the first
// sentence is too long, cut it at max_words words.
std::string truncate_to_sentences(const std::string& text, int max_words) {
  const auto sentences = split_sentences(text);
  std::string kept;
  int words = 0;
  for (const auto& sentence : sentences) {
    const int sentence_words = count_words(sentence);
    if (words + sentence_words > max_words) break;
    if (!kept.empty()) kept += ' ';
    kept += sentence;
    words += sentence_words;
  }
  if (!kept.empty()) return kept;

  // Single run-on sentence: keep the first max_words words.
  std::string out;
  int seen = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) {
      if (seen == max_words) break;
      ++seen;
    }
    in_word = !space;
    out += c;
  }
  return trim(out);
}

struct MarkerParse {
  bool valid = false;
  std::vector<ResponseSentence> sentences;
  std::set<int> markers_seen;
};

bool marker_at(const std::string& text, std::size_t pos, int* value, std::size_t* length) {
  if (text[pos] != '[') return false;
  std::size_t i = pos + 1;
  std::string digits;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits += text[i];
    ++i;
  }
  if (digits.empty() || i >= text.size() || text[i] != ']') return false;
  *value = std::stoi(digits);
  *length = i - pos + 1;
  return true;
}

// Splits rewritten text into sentences, one per marker run. A chunk extends
// past its markers through any immediately following punctuation; text after
// the final marker run must be empty for the parse to be valid.
MarkerParse parse_marked_text(const std::string& text,
                              const std::vector<std::set<std::string>>& input_citations) {
  MarkerParse parse;
  std::vector<ResponseSentence> sentences;
  std::string current_text;
  std::set<int> current_markers;
  std::set<int> all_markers;
  bool pending_sentence_break = false;

  std::size_t i = 0;
  while (i < text.size()) {
    int value = 0;
    std::size_t length = 0;
    if (marker_at(text, i, &value, &length)) {
      current_markers.insert(value);
      all_markers.insert(value);
      pending_sentence_break = true;
      i += length;
      continue;
    }
    const char c = text[i];
    if (pending_sentence_break) {
      if (c == '.' || c == '!' || c == '?' || c == ',' || c == ';' || c == ':') {
        while (!current_text.empty() &&
               std::isspace(static_cast<unsigned char>(current_text.back())) != 0) {
          current_text.pop_back();
        }
        current_text += c;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        ++i;
        continue;
      }
      // Start of the next sentence: flush the current one.
      std::set<std::string> citations;
      for (int marker : current_markers) {
        if (marker >= 1 && static_cast<std::size_t>(marker) <= input_citations.size()) {
          const auto& cited = input_citations[static_cast<std::size_t>(marker) - 1];
          citations.insert(cited.begin(), cited.end());
        }
      }
      const std::string flushed = trim(current_text);
      if (flushed.empty() || current_markers.empty()) return parse;  // sentence without marker
      sentences.push_back(ResponseSentence{flushed, std::move(citations)});
      current_text.clear();
      current_markers.clear();
      pending_sentence_break = false;
      continue;
    }
    current_text += c;
    ++i;
  }

  // Final flush.
  if (!trim(current_text).empty() || !current_markers.empty()) {
    if (current_markers.empty()) return parse;  // trailing text with no marker
    std::set<std::string> citations;
    for (int marker : current_markers) {
      if (marker >= 1 && static_cast<std::size_t>(marker) <= input_citations.size()) {
        const auto& cited = input_citations[static_cast<std::size_t>(marker) - 1];
        citations.insert(cited.begin(), cited.end());
      }
    }
    const std::string flushed = trim(current_text);
    if (flushed.empty()) return parse;
    sentences.push_back(ResponseSentence{flushed, std::move(citations)});
  }

  if (sentences.empty()) return parse;
  parse.valid = true;
  parse.sentences = std::move(sentences);
  parse.markers_seen = std::move(all_markers);
  return parse;
}

}  // namespace

std::optional<ClusterSummary> summarize_cluster(const Query& query, const FacetCluster& cluster,
                                                Provider& provider, const PromptLibrary& prompts,
                                                int word_budget, DiagnosticLog& log,
                                                const SynthesisOptions& options) {
  if (cluster.nuggets.empty()) throw std::invalid_argument("summarize_cluster: empty cluster");
  if (word_budget <= 0) throw std::invalid_argument("summarize_cluster: word_budget must be > 0");

  const std::string base_prompt =
      render_template(prompts.get("summarize"), {{"query", query.text},
                                                 {"nuggets", nugget_block(cluster)},
                                                 {"word_budget", std::to_string(word_budget)}});
  const int hard_cap = (word_budget * 3) / 2;  // 1.5x budget

  auto attempt = [&](const std::string& prompt) -> std::string {
    GenerationRequest request;
    request.prompt = prompt;
    request.max_output_tokens = options.max_output_tokens;
    request.model_tag = options.model_tag;
    request.purpose = Purpose::Summarize;
    return trim(provider.generate(request).text);
  };

  std::string text;
  try {
    text = attempt(base_prompt);
  } catch (const ProviderError& e) {
    log.add(query.id, "", "summary-provider-error", e.what());
    text.clear();
  }

  if (text.empty() || count_words(text) > hard_cap) {
    if (!text.empty()) {
      log.add(query.id, "", "summary-over-budget",
              "cluster " + std::to_string(cluster.cluster_id) + ": " +
                  std::to_string(count_words(text)) + " words > " + std::to_string(hard_cap));
    }
    try {
      text = attempt(base_prompt + kSummaryRetryReminder);
    } catch (const ProviderError& e) {
      log.add(query.id, "", "summary-skipped", e.what());
      return std::nullopt;
    }
    if (text.empty()) {
      log.add(query.id, "", "summary-skipped",
              "cluster " + std::to_string(cluster.cluster_id) + ": empty output");
      return std::nullopt;
    }
    if (count_words(text) > hard_cap) {
      text = truncate_to_sentences(text, hard_cap);
      log.add(query.id, "", "summary-truncated",
              "cluster " + std::to_string(cluster.cluster_id));
    }
  }

  ClusterSummary summary;
  summary.cluster_id = cluster.cluster_id;
  summary.text = text;
  for (const auto& nugget : cluster.nuggets) summary.citations.insert(nugget.passage_id);
  summary.word_count = count_words(text);
  return summary;
}

GroundedResponse assemble_response(const Query& query,
                                   const std::vector<ClusterSummary>& summaries,
                                   const ResponseBudget& budget) {
  GroundedResponse response;
  response.query_id = query.id;
  response.rewritten = false;

  if (budget.kind == ResponseBudget::Kind::Sentences) {
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(budget.value),
                                                   summaries.size());
    for (std::size_t i = 0; i < keep; ++i) {
      response.sentences.push_back(ResponseSentence{summaries[i].text, summaries[i].citations});
    }
  } else {
    int words = 0;
    for (const auto& summary : summaries) {
      const int summary_words = count_words(summary.text);
      if (words + summary_words > budget.value) break;
      response.sentences.push_back(ResponseSentence{summary.text, summary.citations});
      words += summary_words;
    }
  }
  return response;
}

GroundedResponse rewrite_fluency(const GroundedResponse& response, Provider& provider,
                                 const PromptLibrary& prompts, DiagnosticLog& log,
                                 const SynthesisOptions& options) {
  if (response.sentences.empty()) throw std::invalid_argument("rewrite_fluency: empty response");

  std::string marked;
  std::vector<std::set<std::string>> input_citations;
  for (std::size_t i = 0; i < response.sentences.size(); ++i) {
    if (i > 0) marked += ' ';
    marked += response.sentences[i].text;
    marked += " [" + std::to_string(i + 1) + "]";
    input_citations.push_back(response.sentences[i].citations);
  }

  std::set<int> expected_markers;
  for (std::size_t i = 1; i <= response.sentences.size(); ++i)
    expected_markers.insert(static_cast<int>(i));

  const std::string base_prompt =
      render_template(prompts.get("rewrite"), {{"response", marked}});

  auto attempt = [&](const std::string& prompt) -> std::optional<GroundedResponse> {
    GenerationRequest request;
    request.prompt = prompt;
    request.max_output_tokens = options.max_output_tokens;
    request.model_tag = options.model_tag;
    request.purpose = Purpose::Rewrite;
    std::string text;
    try {
      text = trim(provider.generate(request).text);
    } catch (const ProviderError& e) {
      log.add(response.query_id, "", "rewrite-provider-error", e.what());
      return std::nullopt;
    }
    const MarkerParse parse = parse_marked_text(text, input_citations);
    if (!parse.valid || parse.markers_seen != expected_markers) {
      log.add(response.query_id, "", "rewrite-gate-violation",
              parse.valid ? "marker set mismatch" : "unmarked or empty sentence");
      return std::nullopt;
    }
    GroundedResponse rewritten = response;
    rewritten.sentences = parse.sentences;
    rewritten.rewritten = true;
    return rewritten;
  };

  if (auto accepted = attempt(base_prompt)) return *accepted;
  if (auto accepted = attempt(base_prompt + kRewriteRetryReminder)) return *accepted;

  log.add(response.query_id, "", "rewrite-fallback", "returning unrewritten response");
  return response;  // bit-identical fallback
}

std::string build_baseline_prompt(const PromptLibrary& prompts, const Query& query,
                                  const std::vector<Passage>& passages, BaselineMode mode) {
  std::string passage_block;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    passage_block += "[" + std::to_string(i + 1) + "] " + passages[i].text + "\n";
  }
  if (mode == BaselineMode::Plain) {
    return render_template(prompts.get("baseline_plain"),
                           {{"query", query.text}, {"passages", passage_block}});
  }
  return render_template(prompts.get("baseline_cot"), {{"query", query.text},
                                                       {"passages", passage_block},
                                                       {"demonstration", prompts.get("cot_demo")}});
}

GroundedResponse generate_baseline(const Query& query, const std::vector<Passage>& passages,
                                   Provider& provider, const PromptLibrary& prompts,
                                   BaselineMode mode, DiagnosticLog& log,
                                   const SynthesisOptions& options) {
  if (passages.size() != 5)
    throw std::invalid_argument("generate_baseline: exactly 5 passages required");

  GenerationRequest request;
  request.prompt = build_baseline_prompt(prompts, query, passages, mode);
  request.max_output_tokens = options.max_output_tokens;
  request.model_tag = options.model_tag;
  request.purpose = Purpose::Baseline;
  const GenerationResult result = provider.generate(request);  // no fallback for baselines

  std::set<std::string> all_ids;
  for (const auto& passage : passages) all_ids.insert(passage.id);

  GroundedResponse response;
  response.query_id = query.id;
  for (const auto& sentence : split_sentences(result.text)) {
    response.sentences.push_back(ResponseSentence{sentence, all_ids});
  }
  if (response.sentences.empty()) {
    log.add(query.id, "", "baseline-empty-output", "model returned no sentences");
  }
  return response;
}

}  // namespace nuggetgen
