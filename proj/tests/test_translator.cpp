#include <doctest.h>

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gen.hpp"
#include "plancheck/translator.hpp"

using namespace plancheck;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kModel = "MODULE main\nVAR\n  p : boolean;\nASSIGN\n  init(p) := FALSE;\n  next(p) := TRUE;\n";
const char* kSpec = "LTLSPEC F p;\n";

// Fails a fixed number of times, then answers.
class ScriptedProvider : public Provider {
 public:
  ScriptedProvider(int failures, std::string answer) : failures_(failures), answer_(std::move(answer)) {}
  std::string complete(const Prompt&) override {
    ++calls;
    if (failures_-- > 0) throw ProviderError("scripted failure");
    return answer_;
  }
  int calls = 0;

 private:
  int failures_;
  std::string answer_;
};

// Local chat-completions stand-in recording the last request.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> lock(mu_);
      last_auth = req.get_header_value("Authorization");
      last_body = req.body;
      ++hits;
      if (status != 200) {
        res.status = status;
        res.set_content("denied for " + last_auth, "text/plain");
        return;
      }
      nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", answer}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  int status = 200;
  std::string answer;
  std::string last_auth;
  std::string last_body;
  int hits = 0;

 private:
  httplib::Server server_;
  std::thread thread_;
  std::mutex mu_;
  int port_ = 0;
};

ProviderConfig http_config(const std::string& url) {
  ProviderConfig cfg;
  cfg.kind = ProviderKind::HttpChat;
  cfg.endpoint = url;
  cfg.model = "test-model";
  cfg.api_key_env = "PLANCHECK_TEST_KEY";
  cfg.timeout_seconds = 5;
  cfg.retry_backoff_ms = 0;
  return cfg;
}

}  // namespace

TEST_CASE("prompts are byte-stable") {
  const auto a = build_prompt("Plan: a, b.");
  const auto b = build_prompt("Plan: a, b.");
  CHECK(a == b);
  CHECK(a.render() == b.render());
  CHECK(a.messages.size() == 4);
  CHECK(a.messages.back().content.find("Plan: a, b.") != std::string::npos);
  const auto empty = build_prompt("");
  CHECK(empty.messages.size() == 4);
  CHECK(empty.messages.back().role == "user");
}

TEST_CASE("prompt matches the golden file") {
  const auto problems = load_dataset(slurp(PLANCHECK_FIXTURES "/replay/dataset.jsonl"));
  const auto text = build_prompt(*problems.at(0).nl, default_exemplar(), problems.at(0).problem_id).render();
  CHECK(text == slurp(PLANCHECK_FIXTURES "/prompts/p01.prompt.txt"));
}

TEST_CASE("the exemplar is the encoder's output") {
  const auto problem = exemplar_problem();
  CHECK(problem.plan.size() == 3);
  CHECK(simulate_plan(problem).kind == VerdictKind::Valid);
  const auto enc = encode_plan(problem);
  const auto parsed = parse_model(default_exemplar().model_text);
  CHECK(parsed == enc.model);
  const auto r = interpret_response("```smv\n" + default_exemplar().model_text + "```\n");
  REQUIRE(r.parsed());
  CHECK(verify_model(*r.model, *r.spec).kind == VerdictKind::Valid);
}

TEST_CASE("extract_artifacts basic shapes") {
  const auto one = extract_artifacts(std::string("Here you go:\n```smv\n") + kModel + kSpec + "```\nDone.");
  CHECK(one.model_text == kModel);
  CHECK(one.spec_text == kSpec);
  CHECK_THROWS_AS(extract_artifacts("The plan looks fine to me."), ExtractError);
  CHECK_THROWS_AS(extract_artifacts("```\nVAR x : boolean;\n```"), ExtractError);
  const auto two = extract_artifacts(std::string("```\n") + kModel + "```\nand\n```ltl\n" + kSpec + "```\n");
  CHECK(two.model_text == kModel);
  CHECK(two.spec_text == kSpec);
}

TEST_CASE("extract_artifacts on synthetic response shapes") {
  testgen::Rng rng(20);
  const std::vector<std::string> prose = {"", "Sure.\n", "Here is the model:\n", "Notes:\n- one\n- two\n"};
  const std::vector<std::string> tags = {"", "smv", "nusmv", "text"};
  for (int i = 0; i < 20; ++i) {
    const bool same_block = i % 2 == 0;
    const bool decoy_first = i % 3 == 0;
    const bool unterminated_last = i % 5 == 4;
    std::string r = rng.pick(prose);
    if (decoy_first) r += "```json\n{\"not\": \"a model\"}\n```\n";
    r += "```" + rng.pick(tags) + "\n" + kModel;
    if (same_block) {
      r += kSpec;
    } else {
      r += "```\n" + rng.pick(prose) + "```" + rng.pick(tags) + "\n" + kSpec;
    }
    r += unterminated_last ? "" : "```\n" + rng.pick(prose);
    INFO(r);
    const auto a = extract_artifacts(r);
    CHECK(a.model_text == kModel);
    CHECK(a.spec_text == kSpec);
    const auto t = interpret_response(r);
    CHECK(t.parsed());
    CHECK_FALSE(t.failure.has_value());
  }
}

TEST_CASE("interpret_response turns bad text into failures") {
  const auto no_block = interpret_response("I cannot do that.");
  CHECK_FALSE(no_block.parsed());
  REQUIRE(no_block.failure.has_value());
  CHECK(no_block.failure->detail() == "no model block");

  const auto bad = interpret_response("```\nMODULE main\nVAR\n  p : boolean\nASSIGN\n```\n");
  REQUIRE(bad.failure.has_value());
  CHECK(bad.failure->pos().line == 4);

  const auto no_spec = interpret_response(std::string("```\n") + kModel + "```");
  REQUIRE(no_spec.failure.has_value());
  CHECK(no_spec.failure->detail() == "no LTLSPEC in response");

  // Random damage never escapes as an exception.
  testgen::Rng rng(3);
  const std::string good = std::string("```smv\n") + kModel + kSpec + "```\n";
  const std::string junk = "`{}();:=&|!\n LTLSPEC MODULE main case esac";
  for (int i = 0; i < 500; ++i) {
    std::string s = good;
    for (int k = rng.uniform(1, 6); k > 0; --k) {
      const auto at = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(s.size()) - 1));
      switch (rng.uniform(0, 2)) {
        case 0:
          s.erase(at, static_cast<std::size_t>(rng.uniform(1, 5)));
          break;
        case 1:
          s.insert(at, 1, junk[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(junk.size()) - 1))]);
          break;
        default:
          s[at] = junk[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(junk.size()) - 1))];
      }
    }
    TranslationResult r;
    CHECK_NOTHROW(r = interpret_response(s));
    CHECK(r.parsed() != r.failure.has_value());
  }
}

TEST_CASE("judgements") {
  CHECK(parse_judgement("VALID") == true);
  CHECK(parse_judgement("  invalid.\n") == false);
  CHECK(parse_judgement("**VALID**") == true);
  CHECK_FALSE(parse_judgement("maybe").has_value());
  CHECK_FALSE(parse_judgement("The plan is VALID").has_value());
  CHECK(build_judge_prompt("x").messages.size() == 2);
}

TEST_CASE("replay provider") {
  ReplayProvider replay(PLANCHECK_FIXTURES "/replay/formal_llm");
  const auto a = translate("ignored", "p01", replay);
  const auto b = translate("ignored", "p01", replay);
  CHECK(a.parsed());
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(a).find("latency") == std::string::npos);
  CHECK_THROWS_AS(translate("x", "missing-id", replay), ProviderError);
  CHECK_THROWS_AS(translate("x", "../p01", replay), ProviderError);
}

TEST_CASE("retries") {
  const std::string answer = std::string("```\n") + kModel + kSpec + "```";
  ScriptedProvider three(2, answer);
  TranslateOptions opts;
  opts.max_retries = 3;
  CHECK(translate("x", "id", three, opts).parsed());
  CHECK(three.calls == 3);

  ScriptedProvider one(2, answer);
  opts.max_retries = 1;
  CHECK_THROWS_AS(translate("x", "id", one, opts), ProviderError);
  CHECK(one.calls == 2);

  ScriptedProvider none(0, answer);
  opts.max_retries = 0;
  CHECK(translate("x", "id", none, opts).parsed());
}

TEST_CASE("provider config") {
  const auto replay = load_provider_config(R"({"provider": "replay", "transcript_dir": "t"})");
  CHECK(replay.kind == ProviderKind::Replay);
  CHECK(load_provider_config(to_json(replay)).transcript_dir == "t");

  const auto http = load_provider_config(
      R"({"provider": "http_chat", "endpoint": "https://example.test/v1/chat/completions", "model": "m",
          "api_key_env": "MY_KEY", "reasoning_effort": "low"})");
  CHECK_FALSE(http.temperature.has_value());
  CHECK(http.reasoning_effort == "low");

  auto field = [](const char* doc) {
    try {
      load_provider_config(doc);
    } catch (const SchemaError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field(R"({"provider": "replay"})") == "transcript_dir");
  CHECK(field(R"({"provider": "http_chat", "endpoint": "https://x/y", "model": "m"})") == "api_key_env");
  CHECK(field(R"({"provider": "http_chat", "endpoint": "ftp://x", "model": "m", "api_key_env": "K"})") == "endpoint");
  CHECK(field(R"({"provider": "replay", "transcript_dir": "t", "api_key": "sk-123"})") == "api_key");
  CHECK(field(R"({"provider": "replay", "transcript_dir": "t", "token": "abc"})") == "token");
  CHECK(field(R"({"provider": "carrier-pigeon"})") == "provider");
  CHECK(field(R"({"provider": "http_chat", "endpoint": "https://x/y", "model": "m", "api_key_env": "K", "reasoning_effort": "max"})") ==
        "reasoning_effort");
}

TEST_CASE("http provider talks to a chat endpoint") {
  FakeEndpoint server;
  server.answer = std::string("```smv\n") + kModel + kSpec + "```";
  ::setenv("PLANCHECK_TEST_KEY", "sk-secret-value", 1);
  auto cfg = http_config(server.url());

  HttpChatProvider provider(cfg);
  const auto r = translate("plan", "p", provider);
  CHECK(r.parsed());
  CHECK(server.last_auth == "Bearer sk-secret-value");
  auto body = nlohmann::json::parse(server.last_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["messages"].size() == 4);
  CHECK_FALSE(body.contains("temperature"));
  CHECK_FALSE(body.contains("reasoning_effort"));
  CHECK(to_json(r).find("sk-secret-value") == std::string::npos);

  cfg.temperature = 0.0;
  cfg.reasoning_effort = "low";
  HttpChatProvider tuned(cfg);
  tuned.complete(build_prompt("plan"));
  body = nlohmann::json::parse(server.last_body);
  CHECK(body["temperature"] == 0.0);
  CHECK(body["reasoning_effort"] == "low");
  CHECK(tuned.request_body(build_prompt("plan")).find("sk-secret") == std::string::npos);
}

TEST_CASE("http failures are provider errors and never leak the key") {
  FakeEndpoint server;
  server.status = 401;
  ::setenv("PLANCHECK_TEST_KEY", "sk-secret-value", 1);
  auto cfg = http_config(server.url());
  cfg.max_retries = 2;
  try {
    translate("plan", "p", cfg);
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("401") != std::string::npos);
    CHECK(msg.find("sk-secret-value") == std::string::npos);
  }
  CHECK(server.hits == 3);

  ::unsetenv("PLANCHECK_TEST_KEY");
  HttpChatProvider no_key(cfg);
  CHECK_THROWS_AS(no_key.complete(build_prompt("plan")), ProviderError);

  // Nothing listens on port 9 of the loopback interface.
  auto dead = http_config("http://127.0.0.1:9/v1/chat/completions");
  ::setenv("PLANCHECK_TEST_KEY", "k", 1);
  dead.timeout_seconds = 1;
  HttpChatProvider refused(dead);
  CHECK_THROWS_AS(refused.complete(build_prompt("plan")), ProviderError);
}
