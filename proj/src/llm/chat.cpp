#include "lmpso/llm/chat.hpp"

#include <array>
#include <utility>

namespace lmpso::llm {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::system:
      return "system";
    case Role::user:
      return "user";
    case Role::assistant:
      return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "system") return Role::system;
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  throw std::invalid_argument("unknown chat role: " + std::string(name));
}

std::string MetaPrompt::check(const Conversation& messages) {
  if (messages.empty() || messages.front().role != Role::system) {
    return "first message must be the system description";
  }
  for (std::size_t i = 1; i < messages.size(); ++i) {
    if (messages[i].role == Role::system) return "more than one system message";
  }
  for (const auto& m : messages) {
    if (m.role != Role::assistant && m.content.empty()) return "empty system/user content";
  }
  // An assistant turn (current position) with a user turn on each side:
  // the inertia before it and the new direction after it.
  for (std::size_t i = 1; i + 1 < messages.size(); ++i) {
    if (messages[i].role == Role::assistant && messages[i - 1].role == Role::user &&
        messages[i + 1].role == Role::user && !messages[i].content.empty()) {
      return {};
    }
  }
  return "missing user/assistant/user exchange carrying inertia, position and direction";
}

MetaPrompt::MetaPrompt(Conversation messages) : messages_(std::move(messages)) {
  if (auto why = check(messages_); !why.empty()) {
    throw std::invalid_argument("invalid meta-prompt: " + why);
  }
}

MetaPrompt MetaPrompt::standard(std::string system, std::string inertia, std::string position,
                                std::string direction) {
  return MetaPrompt(Conversation{{Role::system, std::move(system)},
                                 {Role::user, std::move(inertia)},
                                 {Role::assistant, std::move(position)},
                                 {Role::user, std::move(direction)}});
}

void SamplingParams::validate() const {
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (max_new_tokens < 1) throw std::invalid_argument("max_new_tokens must be >= 1");
}

SamplingParams default_params(std::string_view problem_kind) {
  struct Entry {
    std::string_view kind;
    int tokens;
  };
  static constexpr std::array<Entry, 5> table{{{"tsp10", 50},
                                               {"tsp20", 100},
                                               {"tsp30", 150},
                                               {"heuristic", 1000},
                                               {"symreg", 200}}};
  for (const auto& e : table) {
    if (e.kind == problem_kind) return SamplingParams{0.9, e.tokens, {}};
  }
  throw UnknownKind("unknown problem kind: " + std::string(problem_kind));
}

}  // namespace lmpso::llm
