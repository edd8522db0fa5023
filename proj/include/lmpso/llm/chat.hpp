#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lmpso::llm {

enum class Role { system, user, assistant };

std::string_view to_string(Role role) noexcept;
Role role_from_string(std::string_view name);

struct ChatMessage {
  Role role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

using Conversation = std::vector<ChatMessage>;

/// Chat transcript that encodes one particle update:
///   system    problem description
///   user      inertia (how the current position was generated)
///   assistant current position
///   user      direction for the next position
/// Construction validates the structure; an invalid transcript never exists.
class MetaPrompt {
 public:
  explicit MetaPrompt(Conversation messages);

  static MetaPrompt standard(std::string system, std::string inertia, std::string position,
                             std::string direction);

  /// Empty string when valid, otherwise a description of the first violation.
  static std::string check(const Conversation& messages);

  const Conversation& messages() const noexcept { return messages_; }

 private:
  Conversation messages_;
};

struct SamplingParams {
  double temperature = 0.9;
  int max_new_tokens = 50;
  std::string model_name;

  void validate() const;
};

class BackendUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScriptExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownKind : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A chat-completion service. Implementations must tolerate concurrent calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const Conversation& messages, const SamplingParams& params) = 0;

  std::string complete(const MetaPrompt& prompt, const SamplingParams& params) {
    return complete(prompt.messages(), params);
  }
};

/// Per-problem sampling defaults: temperature 0.9 and the max-new-token budget
/// for tsp10/tsp20/tsp30/heuristic/symreg. Throws UnknownKind otherwise.
SamplingParams default_params(std::string_view problem_kind);

}  // namespace lmpso::llm
