#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nuggetgen/provider.hpp"

namespace nuggetgen {

using json = nlohmann::json;

namespace {

// Counting semaphore bounding concurrent requests per provider.
class InFlightLimit {
 public:
  explicit InFlightLimit(int limit) : available_(limit > 0 ? limit : 1) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }

  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

struct InFlightGuard {
  explicit InFlightGuard(InFlightLimit& limit) : limit_(limit) { limit_.acquire(); }
  ~InFlightGuard() { limit_.release(); }
  InFlightLimit& limit_;
};

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

}  // namespace

struct HttpProvider::Impl {
  HttpProviderConfig config;
  std::string api_key;
  InFlightLimit limit;

  explicit Impl(HttpProviderConfig cfg)
      : config(std::move(cfg)), limit(config.max_in_flight) {
    if (!config.api_key_env.empty()) {
      if (const char* key = std::getenv(config.api_key_env.c_str())) api_key = key;
    }
  }

  httplib::Client make_client() const {
    httplib::Client client(config.base_url);
    client.set_connection_timeout(config.timeout_s, 0);
    client.set_read_timeout(config.timeout_s, 0);
    client.set_write_timeout(config.timeout_s, 0);
    if (!api_key.empty()) client.set_bearer_token_auth(api_key);
    return client;
  }

  // POSTs the body, retrying transient failures with exponential backoff.
  json post_json(const std::string& path, const json& body) {
    InFlightGuard guard(limit);
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
      if (attempt > 0) {
        const auto delay = std::chrono::milliseconds(config.retry_backoff_ms << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
      auto client = make_client();
      auto result = client.Post(path, body.dump(), "application/json");
      if (!result) {
        last_error = "transport: " + httplib::to_string(result.error());
        continue;
      }
      if (result->status == 401 || result->status == 403) {
        throw AuthError("http provider: status " + std::to_string(result->status) + " from " +
                        config.base_url + path);
      }
      if (retryable_status(result->status)) {
        last_error = "status " + std::to_string(result->status);
        continue;
      }
      if (result->status != 200) {
        throw TransportError("http provider: status " + std::to_string(result->status) + ": " +
                             result->body.substr(0, 200));
      }
      try {
        return json::parse(result->body);
      } catch (const json::exception& e) {
        throw ContractViolation(std::string("http provider: bad JSON response: ") + e.what());
      }
    }
    throw TransportError("http provider: retries exhausted (" + last_error + ")");
  }
};

HttpProvider::HttpProvider(HttpProviderConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpProvider::~HttpProvider() = default;

GenerationResult HttpProvider::generate(const GenerationRequest& request) {
  validate_request(request);
  json body;
  body["model"] = request.model_tag.empty() ? impl_->config.model : request.model_tag;
  body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;

  const json response = impl_->post_json(impl_->config.chat_path, body);
  try {
    const json& choice = response.at("choices").at(0);
    GenerationResult result;
    result.text = choice.at("message").at("content").get<std::string>();
    result.model_tag = response.value("model", impl_->config.model);
    result.truncated = choice.value("finish_reason", "stop") == "length";
    return result;
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("http provider: unexpected chat schema: ") + e.what());
  }
}

std::vector<EmbeddingVector> HttpProvider::embed(const std::vector<std::string>& texts) {
  validate_embed_input(texts);
  json body;
  body["model"] = impl_->config.model;
  body["input"] = texts;

  const json response = impl_->post_json(impl_->config.embed_path, body);
  std::vector<EmbeddingVector> out;
  try {
    for (const auto& item : response.at("data")) {
      EmbeddingVector vector;
      vector.values = item.at("embedding").get<std::vector<float>>();
      vector.dim = static_cast<int>(vector.values.size());
      out.push_back(std::move(vector));
    }
  } catch (const json::exception& e) {
    throw ContractViolation(std::string("http provider: unexpected embed schema: ") + e.what());
  }
  validate_embeddings(out, texts.size());
  return out;
}

std::string HttpProvider::tag() const { return impl_->config.model; }

}  // namespace nuggetgen
