#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nuggetgen {

enum class Purpose { Detect, Summarize, Rewrite, Baseline, JudgeCreate, JudgeAssign };

const char* purpose_name(Purpose purpose);

struct GenerationRequest {
  std::string prompt;
  int max_output_tokens = 1024;
  double temperature = 0.0;
  std::string model_tag;
  Purpose purpose = Purpose::Detect;
};

struct GenerationResult {
  std::string text;
  std::string model_tag;
  bool cached = false;
  bool truncated = false;  // backend hit its output budget
};

struct EmbeddingVector {
  std::vector<float> values;
  int dim = 0;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport failed after the configured retries.
class TransportError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// The backend broke its contract (bad dimensions, out-of-range values, ...).
class ContractViolation : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Uniform contract for every external model service: generation, embedding
// and judging all go through this interface, distinguished by the request's
// purpose and model_tag. Implementations must be callable from many workers
// at once.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual GenerationResult generate(const GenerationRequest& request) = 0;

  // One vector per input, order preserved, all the same dimension.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;

  virtual std::string tag() const = 0;
};

// Throws std::invalid_argument on precondition violations.
void validate_request(const GenerationRequest& request);
void validate_embed_input(const std::vector<std::string>& texts);
void validate_embeddings(const std::vector<EmbeddingVector>& vectors, std::size_t expected_count);

struct CacheKey {
  std::string digest;

  static CacheKey of(const GenerationRequest& request);
};

// One JSON file per key under <root>/<purpose>/<digest>.json. Writes go
// through a temp file and an atomic rename, so concurrent writers leave one
// intact winner and readers never observe torn files.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path root);

  std::optional<GenerationResult> get(Purpose purpose, const CacheKey& key) const;
  void put(Purpose purpose, const CacheKey& key, const GenerationResult& value);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

// Wraps a provider with the disk cache. Only temperature-0 requests are
// cached; anything else always reaches the inner provider.
class CachingProvider : public Provider {
 public:
  CachingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<DiskCache> cache);

  GenerationResult generate(const GenerationRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string tag() const override;

 private:
  std::shared_ptr<Provider> inner_;
  std::shared_ptr<DiskCache> cache_;
};

struct MockRule {
  std::string match_substring;
  std::string response_text;
};

// Deterministic scripted provider for offline runs and tests. generate()
// returns the response of the first rule whose substring occurs in the
// prompt; embed() is a hashing projection of the text's tokens, so identical
// texts always map to identical vectors.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::vector<MockRule> rules, int embedding_dim = 256,
                        std::string tag = "mock");

  static MockProvider from_script_file(const std::filesystem::path& path);
  // Accepts either a JSON array of rules or an object with "rules",
  // optional "embedding_dim" and optional "pair_scores".
  static MockProvider from_script_json(const std::string& json_text);

  GenerationResult generate(const GenerationRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string tag() const override { return tag_; }

  int embedding_dim() const { return embedding_dim_; }

  static EmbeddingVector hash_embed(const std::string& text, int dim);

 private:
  std::vector<MockRule> rules_;
  int embedding_dim_;
  std::string tag_;
};

struct HttpProviderConfig {
  std::string base_url;  // scheme://host[:port]
  std::string chat_path = "/v1/chat/completions";
  std::string embed_path = "/v1/embeddings";
  std::string model;
  std::string api_key_env;  // name of the env var holding the key
  int max_retries = 3;
  int retry_backoff_ms = 250;
  int max_in_flight = 4;
  int timeout_s = 60;
};

// OpenAI-style chat/embeddings backend over HTTP JSON. Transient transport
// failures (connect errors, 429, 5xx) are retried with exponential backoff;
// an in-flight limit provides rate limiting across worker threads.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);
  ~HttpProvider() override;

  GenerationResult generate(const GenerationRequest& request) override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  std::string tag() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nuggetgen
