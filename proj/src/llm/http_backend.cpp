#include "lmpso/llm/http_backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace lmpso::llm {
namespace {

constexpr std::string_view kCompletionsSuffix = "/chat/completions";

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::pair<std::string, std::string> split_endpoint(std::string endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint must start with http:// or https://: " + endpoint);
  }
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  const auto path_start = endpoint.find('/', scheme_end + 3);
  std::string origin = endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? std::string{} : endpoint.substr(path_start);
  if (!ends_with(path, kCompletionsSuffix)) path += kCompletionsSuffix;
  return {origin, path};
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return (v && *v) ? v : nullptr;
}

}  // namespace

std::optional<HttpBackendOptions> HttpBackendOptions::from_env(std::string* model_out) {
  const char* base = env("LMPSO_API_BASE");
  if (!base) return std::nullopt;
  HttpBackendOptions opts;
  opts.endpoint = base;
  if (const char* key = env("LMPSO_API_KEY")) opts.api_key = key;
  if (model_out) {
    if (const char* model = env("LMPSO_MODEL")) *model_out = model;
  }
  return opts;
}

nlohmann::json build_request_body(const Conversation& messages, const SamplingParams& params) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  return {{"model", params.model_name},
          {"messages", std::move(msgs)},
          {"temperature", params.temperature},
          {"max_tokens", params.max_new_tokens}};
}

std::string parse_completion(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedResponse(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw MalformedResponse("response has no choices");
  }
  const auto& first = j["choices"][0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw MalformedResponse("choices[0].message.content missing");
  }
  return first["message"]["content"].get<std::string>();
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  std::tie(origin_, path_) = split_endpoint(options_.endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (origin_.rfind("https://", 0) == 0) {
    throw std::invalid_argument("https endpoint requested but built without OpenSSL");
  }
#endif
}

std::string HttpBackend::complete(const Conversation& messages, const SamplingParams& params) {
  params.validate();
  if (messages.empty()) throw std::invalid_argument("empty conversation");
  const std::string body = build_request_body(messages, params).dump();

  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = options_.backoff_base * (1LL << std::min(attempt - 1, 20));
      std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(delay, options_.backoff_cap));
    }
    httplib::Client client(origin_);
    const auto secs = options_.timeout.count() / 1000;
    const auto usecs = (options_.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    ++requests_;
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return parse_completion(res->body);
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (res->status != 429 && res->status < 500) break;
  }
  throw BackendUnavailable("chat completion failed (" + origin_ + path_ + "): " + last_error);
}

}  // namespace lmpso::llm
