#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

#include "lmpso/llm/chat.hpp"

namespace lmpso::llm {

struct HttpBackendOptions {
  /// Either a base like "http://host:8000/v1" or the full chat-completions URL.
  std::string endpoint;
  std::string api_key;
  std::chrono::milliseconds timeout{120'000};
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_cap{8'000};

  /// Reads LMPSO_API_BASE, LMPSO_API_KEY and LMPSO_MODEL. Returns nullopt when
  /// LMPSO_API_BASE is unset. The model name goes to `model_out` if set.
  static std::optional<HttpBackendOptions> from_env(std::string* model_out = nullptr);
};

/// Chat-completions request body: messages, model, temperature, max_tokens.
nlohmann::json build_request_body(const Conversation& messages, const SamplingParams& params);

/// choices[0].message.content, verbatim. Throws MalformedResponse.
std::string parse_completion(const std::string& body);

/// Client for any OpenAI-compatible chat-completions server.
///
/// Network errors, timeouts, 429 and 5xx are retried up to max_retries times
/// with exponential backoff, then surface as BackendUnavailable. Other non-2xx
/// statuses fail immediately. Safe for concurrent use: every call opens its own
/// connection.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  using ChatBackend::complete;
  std::string complete(const Conversation& messages, const SamplingParams& params) override;

  std::size_t request_count() const noexcept { return requests_.load(); }

 private:
  HttpBackendOptions options_;
  std::string origin_;  // scheme://host:port
  std::string path_;    // .../chat/completions
  std::atomic<std::size_t> requests_{0};
};

}  // namespace lmpso::llm
