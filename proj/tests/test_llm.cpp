#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "lmpso/llm/chat.hpp"
#include "lmpso/llm/http_backend.hpp"
#include "lmpso/llm/mock_backend.hpp"
#include "lmpso/rng.hpp"
#include "lmpso/swarm/prompt_template.hpp"

using namespace lmpso;
using namespace lmpso::llm;

TEST_CASE("meta-prompt accepts the standard four-turn layout") {
  auto mp = MetaPrompt::standard("describe", "inertia", "position", "direction");
  REQUIRE(mp.messages().size() == 4);
  CHECK(mp.messages()[0].role == Role::system);
  CHECK(mp.messages()[1].role == Role::user);
  CHECK(mp.messages()[2].role == Role::assistant);
  CHECK(mp.messages()[3].role == Role::user);
  CHECK(MetaPrompt::check(mp.messages()).empty());
}

TEST_CASE("meta-prompt rejects malformed transcripts") {
  CHECK_THROWS_AS(MetaPrompt(Conversation{}), std::invalid_argument);
  CHECK_THROWS_AS(MetaPrompt(Conversation{{Role::user, "a"}, {Role::assistant, "b"}, {Role::user, "c"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MetaPrompt::standard("", "i", "p", "d"), std::invalid_argument);
  CHECK_THROWS_AS(MetaPrompt::standard("s", "i", "", "d"), std::invalid_argument);
  CHECK_THROWS_AS(MetaPrompt(Conversation{{Role::system, "s"}, {Role::user, "u"}}), std::invalid_argument);
  CHECK_THROWS_AS(MetaPrompt(Conversation{{Role::system, "s"}, {Role::user, "u"}, {Role::assistant, "a"},
                                          {Role::system, "again"}, {Role::user, "d"}}),
                  std::invalid_argument);
}

TEST_CASE("roles round-trip through their names") {
  for (auto r : {Role::system, Role::user, Role::assistant}) CHECK(role_from_string(to_string(r)) == r);
  CHECK_THROWS(role_from_string("tool"));
}

TEST_CASE("per-kind sampling defaults") {
  struct Row {
    const char* kind;
    int tokens;
  };
  for (auto [kind, tokens] : {Row{"tsp10", 50}, Row{"tsp20", 100}, Row{"tsp30", 150}, Row{"heuristic", 1000},
                              Row{"symreg", 200}}) {
    const auto p = default_params(kind);
    CHECK(p.max_new_tokens == tokens);
    CHECK(p.temperature == 0.9);
  }
  CHECK_THROWS_AS(default_params("knapsack"), UnknownKind);
  SamplingParams bad;
  bad.max_new_tokens = 0;
  CHECK_THROWS(bad.validate());
  bad = {};
  bad.temperature = -0.1;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("finite mock script exhausts") {
  MockBackend mock(MockScript::finite({"a", "b"}));
  const Conversation c{{Role::system, "s"}};
  CHECK(mock.complete(c, {}) == "a");
  CHECK(mock.complete(c, {}) == "b");
  CHECK_THROWS_AS(mock.complete(c, {}), ScriptExhausted);
  CHECK(mock.history().size() == 3);
}

TEST_CASE("cyclic mock script wraps") {
  MockBackend mock(MockScript::cyclic({"a", "b"}));
  const Conversation c{{Role::system, "s"}};
  std::string got;
  for (int i = 0; i < 5; ++i) got += mock.complete(c, {});
  CHECK(got == "ababa");
  CHECK(mock.query_count() == 5);
}

TEST_CASE("hashed mock depends only on the prompt") {
  const auto script = MockScript::hashed({"r0", "r1", "r2", "r3", "r4", "r5", "r6"});
  MockBackend a(script), b(script);
  const Conversation p1{{Role::system, "one"}}, p2{{Role::system, "two"}};
  const auto a1 = a.complete(p1, {});
  a.complete(p2, {});
  b.complete(p2, {});
  CHECK(b.complete(p1, {}) == a1);
  CHECK(prompt_hash(p1) == prompt_hash(Conversation{{Role::system, "one"}}));
  CHECK(prompt_hash(p1) != prompt_hash(p2));
  // Role is part of the hash.
  CHECK(prompt_hash(Conversation{{Role::user, "one"}}) != prompt_hash(p1));
}

TEST_CASE("keyed rules take precedence and cycle") {
  MockScript s = MockScript::cyclic({"default"});
  s.keyed.push_back({"swarm best", {"k1", "k2"}});
  MockBackend mock(s);
  const Conversation keyed{{Role::system, "s"}, {Role::user, "the swarm best is ..."}};
  const Conversation plain{{Role::system, "s"}};
  CHECK(mock.complete(keyed, {}) == "k1");
  CHECK(mock.complete(plain, {}) == "default");
  CHECK(mock.complete(keyed, {}) == "k2");
  CHECK(mock.complete(keyed, {}) == "k1");
}

TEST_CASE("mock script JSON form") {
  const auto j = nlohmann::json::parse(
      R"({"mode":"finite","responses":["x"],"keyed":[{"contains":"abc","responses":["y"]}]})");
  const auto s = MockScript::from_json(j);
  CHECK(s.mode == MockScript::Mode::finite);
  REQUIRE(s.keyed.size() == 1);
  CHECK(s.keyed[0].contains == "abc");
  CHECK_THROWS(MockScript::from_json(nlohmann::json::parse(R"({"mode":"random","responses":["x"]})")));
  CHECK_THROWS(MockScript::from_json(nlohmann::json::parse(R"({"mode":"cyclic","responses":[]})")));

  const auto path = std::filesystem::temp_directory_path() / "lmpso_mock_script.json";
  std::ofstream(path) << j.dump();
  CHECK(MockScript::load(path).responses == std::vector<std::string>{"x"});
  std::filesystem::remove(path);
  CHECK_THROWS(MockScript::load("/nonexistent/lmpso.json"));
}

TEST_CASE("callback backend counts calls") {
  CallbackBackend cb([](const Conversation& c, const SamplingParams&) { return c.back().content; });
  CHECK(cb.complete(Conversation{{Role::system, "echo"}}, {}) == "echo");
  CHECK(cb.query_count() == 1);
}

TEST_CASE("chat-completions request body") {
  SamplingParams p;
  p.temperature = 0.9;
  p.max_new_tokens = 77;
  p.model_name = "some-model";
  const auto body = build_request_body({{Role::system, "s"}, {Role::user, "u"}}, p);
  CHECK(body["model"] == "some-model");
  CHECK(body["temperature"] == 0.9);
  CHECK(body["max_tokens"] == 77);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["content"] == "u");
  CHECK_FALSE(body.contains("top_p"));
}

TEST_CASE("completion parsing") {
  CHECK(parse_completion(R"({"choices":[{"message":{"role":"assistant","content":"[0, 1]"}}]})") == "[0, 1]");
  CHECK_THROWS_AS(parse_completion("not json"), MalformedResponse);
  CHECK_THROWS_AS(parse_completion(R"({"choices":[]})"), MalformedResponse);
  CHECK_THROWS_AS(parse_completion(R"({"choices":[{"message":{}}]})"), MalformedResponse);
}

TEST_CASE("template filling") {
  using swarm::fill_template;
  CHECK(fill_template("a {x} b {y} {x}", {{"x", "1"}, {"y", "2"}}) == "a 1 b 2 1");
  CHECK(fill_template("keep {unknown} and {", {{"x", "1"}}) == "keep {unknown} and {");
  CHECK(fill_template("{x}", {{"x", "{x}"}}) == "{x}");
}

TEST_CASE("number formatting") {
  CHECK(swarm::format_number(0.1) == "0.1");
  CHECK(swarm::format_number(40.0) == "40");
  CHECK(std::stod(swarm::format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(swarm::format_fixed(2.0 / 3.0, 2) == "0.67");
}

TEST_CASE("named random streams") {
  auto a = make_stream(7, "swarm.particle", 3);
  auto b = make_stream(7, "swarm.particle", 3);
  auto c = make_stream(7, "swarm.particle", 4);
  auto d = make_stream(7, "tsp.layout", 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("splitmix64 reference outputs") {
  // Published reference sequence for seed 0.
  SplitMix64 g(0);
  CHECK(g() == 0xe220a8397b1dcdafull);
  CHECK(g() == 0x6e789e6aa1b965f4ull);
  CHECK(g() == 0x06c45d188009454full);
}
