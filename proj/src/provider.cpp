#include "nuggetgen/provider.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nuggetgen/text.hpp"

namespace nuggetgen {

using json = nlohmann::json;

const char* purpose_name(Purpose purpose) {
  switch (purpose) {
    case Purpose::Detect:
      return "detect";
    case Purpose::Summarize:
      return "summarize";
    case Purpose::Rewrite:
      return "rewrite";
    case Purpose::Baseline:
      return "baseline";
    case Purpose::JudgeCreate:
      return "judge_create";
    case Purpose::JudgeAssign:
      return "judge_assign";
  }
  return "unknown";
}

void validate_request(const GenerationRequest& request) {
  if (request.prompt.empty()) throw std::invalid_argument("generate: empty prompt");
  if (request.max_output_tokens <= 0)
    throw std::invalid_argument("generate: max_output_tokens must be > 0");
  if (request.temperature < 0.0) throw std::invalid_argument("generate: negative temperature");
}

void validate_embed_input(const std::vector<std::string>& texts) {
  if (texts.empty()) throw std::invalid_argument("embed: empty input list");
  for (const auto& text : texts) {
    if (text.empty()) throw std::invalid_argument("embed: empty text in input list");
  }
}

void validate_embeddings(const std::vector<EmbeddingVector>& vectors,
                         std::size_t expected_count) {
  if (vectors.size() != expected_count)
    throw ContractViolation("embed: backend returned wrong vector count");
  int dim = -1;
  for (const auto& vector : vectors) {
    if (vector.dim <= 0 || vector.values.size() != static_cast<std::size_t>(vector.dim))
      throw ContractViolation("embed: inconsistent vector dimension");
    if (dim == -1) dim = vector.dim;
    if (vector.dim != dim) throw ContractViolation("embed: dimension mismatch across batch");
    for (float v : vector.values) {
      if (!std::isfinite(v)) throw ContractViolation("embed: non-finite entry");
    }
  }
}

CacheKey CacheKey::of(const GenerationRequest& request) {
  char temperature[64];
  std::snprintf(temperature, sizeof(temperature), "%.17g", request.temperature);
  std::string canonical;
  canonical.reserve(request.prompt.size() + request.model_tag.size() + 64);
  canonical += request.model_tag;
  canonical += '\x1f';
  canonical += std::to_string(request.max_output_tokens);
  canonical += '\x1f';
  canonical += temperature;
  canonical += '\x1f';
  canonical += request.prompt;
  return CacheKey{content_digest(canonical)};
}

DiskCache::DiskCache(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

namespace {

std::filesystem::path entry_path(const std::filesystem::path& root, Purpose purpose,
                                 const CacheKey& key) {
  return root / purpose_name(purpose) / (key.digest + ".json");
}

}  // namespace

std::optional<GenerationResult> DiskCache::get(Purpose purpose, const CacheKey& key) const {
  const auto path = entry_path(root_, purpose, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    return std::nullopt;  // torn or foreign file; treat as a miss
  }
  GenerationResult result;
  result.text = j.value("text", "");
  result.model_tag = j.value("model_tag", "");
  result.truncated = j.value("truncated", false);
  result.cached = true;
  return result;
}

void DiskCache::put(Purpose purpose, const CacheKey& key, const GenerationResult& value) {
  const auto path = entry_path(root_, purpose, key);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);

  json j;
  j["text"] = value.text;
  j["model_tag"] = value.model_tag;
  j["truncated"] = value.truncated;

  // Unique temp name per writer, then atomic rename.
  static std::atomic<unsigned> counter{0};
  const auto tmp = path.parent_path() /
                   (key.digest + ".tmp." + std::to_string(::getpid()) + "." +
                    std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
    out << j.dump();
    out.flush();
    if (!out) throw std::runtime_error("cache: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cache: rename failed for " + path.string());
  }
}

CachingProvider::CachingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<DiskCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

GenerationResult CachingProvider::generate(const GenerationRequest& request) {
  validate_request(request);
  const bool cacheable = request.temperature == 0.0 && cache_ != nullptr;
  const CacheKey key = CacheKey::of(request);
  if (cacheable) {
    if (auto hit = cache_->get(request.purpose, key)) return *hit;
  }
  GenerationResult result = inner_->generate(request);
  result.cached = false;
  if (cacheable) cache_->put(request.purpose, key, result);
  return result;
}

std::vector<EmbeddingVector> CachingProvider::embed(const std::vector<std::string>& texts) {
  return inner_->embed(texts);
}

std::string CachingProvider::tag() const { return inner_->tag(); }

MockProvider::MockProvider(std::vector<MockRule> rules, int embedding_dim, std::string tag)
    : rules_(std::move(rules)), embedding_dim_(embedding_dim), tag_(std::move(tag)) {
  if (embedding_dim_ <= 0) throw std::invalid_argument("mock: embedding_dim must be > 0");
}

MockProvider MockProvider::from_script_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mock: cannot open script " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_script_json(buffer.str());
}

MockProvider MockProvider::from_script_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  const json& rules_json = j.is_array() ? j : j.at("rules");
  std::vector<MockRule> rules;
  for (const auto& rule : rules_json) {
    rules.push_back(MockRule{rule.at("match_substring").get<std::string>(),
                             rule.at("response_text").get<std::string>()});
  }
  int dim = 256;
  if (j.is_object() && j.contains("embedding_dim")) dim = j["embedding_dim"].get<int>();
  return MockProvider(std::move(rules), dim);
}

GenerationResult MockProvider::generate(const GenerationRequest& request) {
  validate_request(request);
  for (const auto& rule : rules_) {
    if (request.prompt.find(rule.match_substring) != std::string::npos) {
      return GenerationResult{rule.response_text, tag_, false, false};
    }
  }
  throw ProviderError("mock: no rule matches prompt for purpose " +
                      std::string(purpose_name(request.purpose)));
}

EmbeddingVector MockProvider::hash_embed(const std::string& text, int dim) {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) tokens.push_back(text);  // punctuation-only text still embeds
  std::vector<float> values(static_cast<std::size_t>(dim), 0.0f);
  for (const auto& token : tokens) {
    const std::uint64_t h = fnv1a64(token);
    const auto idx = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim));
    const float sign = ((h >> 32) & 1) ? 1.0f : -1.0f;
    values[idx] += sign;
  }
  float norm = 0.0f;
  for (float v : values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0f) {
    for (float& v : values) v /= norm;
  }
  return EmbeddingVector{std::move(values), dim};
}

std::vector<EmbeddingVector> MockProvider::embed(const std::vector<std::string>& texts) {
  validate_embed_input(texts);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(hash_embed(text, embedding_dim_));
  return out;
}

}  // namespace nuggetgen
