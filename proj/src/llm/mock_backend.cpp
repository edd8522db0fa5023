#include "lmpso/llm/mock_backend.hpp"

#include <fstream>

#include "lmpso/rng.hpp"

namespace lmpso::llm {

MockScript MockScript::finite(std::vector<std::string> responses) {
  return MockScript{Mode::finite, std::move(responses), {}};
}

MockScript MockScript::cyclic(std::vector<std::string> responses) {
  return MockScript{Mode::cyclic, std::move(responses), {}};
}

MockScript MockScript::hashed(std::vector<std::string> responses) {
  return MockScript{Mode::hashed, std::move(responses), {}};
}

MockScript MockScript::from_json(const nlohmann::json& j) {
  MockScript script;
  const auto mode = j.value("mode", std::string("cyclic"));
  if (mode == "finite") {
    script.mode = Mode::finite;
  } else if (mode == "cyclic") {
    script.mode = Mode::cyclic;
  } else if (mode == "hashed") {
    script.mode = Mode::hashed;
  } else {
    throw std::invalid_argument("mock script: unknown mode '" + mode + "'");
  }
  script.responses = j.value("responses", std::vector<std::string>{});
  if (j.contains("keyed")) {
    for (const auto& rule : j.at("keyed")) {
      KeyedRule k{rule.at("contains").get<std::string>(),
                  rule.at("responses").get<std::vector<std::string>>()};
      if (k.responses.empty()) throw std::invalid_argument("mock script: keyed rule without responses");
      script.keyed.push_back(std::move(k));
    }
  }
  if (script.responses.empty() && script.keyed.empty()) {
    throw std::invalid_argument("mock script has no responses");
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mock script " + path.string());
  return from_json(nlohmann::json::parse(in));
}

std::uint64_t prompt_hash(const Conversation& messages) {
  std::string flat;
  for (const auto& m : messages) {
    flat += to_string(m.role);
    flat += '\x1f';
    flat += m.content;
    flat += '\x1e';
  }
  return fnv1a(flat);
}

MockBackend::MockBackend(MockScript script)
    : script_(std::move(script)), keyed_cursors_(script_.keyed.size(), 0) {}

std::string MockBackend::complete(const Conversation& messages, const SamplingParams&) {
  std::lock_guard lock(mutex_);
  ++queries_;
  history_.push_back(messages);

  for (std::size_t r = 0; r < script_.keyed.size(); ++r) {
    const auto& rule = script_.keyed[r];
    for (const auto& m : messages) {
      if (m.content.find(rule.contains) != std::string::npos) {
        return rule.responses[keyed_cursors_[r]++ % rule.responses.size()];
      }
    }
  }

  if (script_.responses.empty()) throw ScriptExhausted("no keyed rule matched and no default responses");
  switch (script_.mode) {
    case MockScript::Mode::finite:
      if (cursor_ >= script_.responses.size()) {
        throw ScriptExhausted("mock script exhausted after " + std::to_string(cursor_) + " replies");
      }
      return script_.responses[cursor_++];
    case MockScript::Mode::cyclic:
      return script_.responses[cursor_++ % script_.responses.size()];
    case MockScript::Mode::hashed:
      return script_.responses[prompt_hash(messages) % script_.responses.size()];
  }
  return {};
}

std::vector<Conversation> MockBackend::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

}  // namespace lmpso::llm
