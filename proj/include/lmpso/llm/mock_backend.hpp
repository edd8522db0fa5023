#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmpso/llm/chat.hpp"

namespace lmpso::llm {

/// Scripted replies for the deterministic stand-in model.
///
/// JSON form:
///   {"mode": "finite" | "cyclic" | "hashed",
///    "responses": ["...", ...],
///    "keyed": [{"contains": "global best", "responses": ["..."]}, ...]}
///
/// Keyed rules are tried first, in order; a rule matches when any message of
/// the prompt contains its substring, and its replies cycle. In hashed mode the
/// reply is picked by a hash of the whole prompt, so it does not depend on call
/// order and stays deterministic when particles query concurrently.
struct MockScript {
  enum class Mode { finite, cyclic, hashed };

  struct KeyedRule {
    std::string contains;
    std::vector<std::string> responses;
  };

  Mode mode = Mode::cyclic;
  std::vector<std::string> responses;
  std::vector<KeyedRule> keyed;

  static MockScript finite(std::vector<std::string> responses);
  static MockScript cyclic(std::vector<std::string> responses);
  static MockScript hashed(std::vector<std::string> responses);

  static MockScript from_json(const nlohmann::json& j);
  static MockScript load(const std::filesystem::path& path);
};

/// Hash of a transcript, stable across runs and platforms.
std::uint64_t prompt_hash(const Conversation& messages);

class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(MockScript script);

  using ChatBackend::complete;
  std::string complete(const Conversation& messages, const SamplingParams& params) override;

  std::size_t query_count() const noexcept { return queries_.load(); }
  /// Every prompt received, in arrival order.
  std::vector<Conversation> history() const;

 private:
  MockScript script_;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> keyed_cursors_;
  std::vector<Conversation> history_;
  mutable std::mutex mutex_;
  std::atomic<std::size_t> queries_{0};
};

/// Backend driven by a caller-supplied function. Test double for retry and
/// fault-injection paths; the function is called under a lock.
class CallbackBackend final : public ChatBackend {
 public:
  using Fn = std::function<std::string(const Conversation&, const SamplingParams&)>;
  explicit CallbackBackend(Fn fn) : fn_(std::move(fn)) {}

  using ChatBackend::complete;
  std::string complete(const Conversation& messages, const SamplingParams& params) override {
    std::lock_guard lock(mutex_);
    ++queries_;
    return fn_(messages, params);
  }

  std::size_t query_count() const noexcept { return queries_.load(); }

 private:
  Fn fn_;
  std::mutex mutex_;
  std::atomic<std::size_t> queries_{0};
};

}  // namespace lmpso::llm
