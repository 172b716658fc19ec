#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plancheck/error.hpp"
#include "plancheck/plan.hpp"
#include "plancheck/smv.hpp"

namespace plancheck {

enum class ProviderKind { HttpChat, Replay };

/// Completion provider settings, read from a JSON file. The API key itself is
/// never part of the config: only the name of the environment variable that
/// holds it.
struct ProviderConfig {
  ProviderKind kind = ProviderKind::Replay;
  std::string endpoint;        // http_chat: full URL of the chat-completions route
  std::string model;
  std::string api_key_env;     // http_chat: name of the env var holding the key
  std::optional<double> temperature;               // omitted from requests when absent
  std::optional<std::string> reasoning_effort;     // minimal | low | medium | high
  double timeout_seconds = 120.0;
  int max_retries = 2;         // attempts after the first one
  int retry_backoff_ms = 500;  // doubled after every failed attempt
  int max_in_flight = 4;
  std::string transcript_dir;  // replay: one <problem_id>.txt per problem

  /// Throws SchemaError when required fields for `kind` are missing.
  void validate() const;
};

/// Parses a config document. An inline key field ("api_key", "key", ...) is
/// rejected rather than ignored.
ProviderConfig load_provider_config(std::string_view json);
std::string to_json(const ProviderConfig& cfg);

struct ChatMessage {
  std::string role;
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// What is handed to a provider. `problem_id` is routing metadata for replay
/// and is not sent over the wire.
struct Prompt {
  std::string problem_id;
  std::vector<ChatMessage> messages;

  /// Stable plain-text rendering, used for golden files.
  std::string render() const;
  friend bool operator==(const Prompt&, const Prompt&) = default;
};

struct Exemplar {
  std::string plan_text;
  std::string model_text;  // MODULE main ... LTLSPEC ...
};

/// The shipped one-shot example: a three-action plan and its encoding.
const Exemplar& default_exemplar();
/// The structured problem the exemplar encodes.
PlanProblem exemplar_problem();

Prompt build_prompt(std::string_view nl_plan, const Exemplar& exemplar = default_exemplar(),
                    std::string problem_id = {});

/// Prompt for asking the model directly whether a plan is valid.
Prompt build_judge_prompt(std::string_view nl_plan, std::string problem_id = {});

/// VALID -> true, INVALID -> false, anything else -> nullopt. Surrounding
/// whitespace, markdown emphasis, and a trailing period are tolerated.
std::optional<bool> parse_judgement(std::string_view response);

struct Artifacts {
  std::string model_text;
  std::string spec_text;
};

/// Picks the first fenced block holding "MODULE main". Its LTLSPEC part, or
/// the first later block holding LTLSPEC, becomes the spec text. Throws
/// ExtractError("no model block") when there is none.
Artifacts extract_artifacts(std::string_view response);

/// Single operation: prompt in, response text out. Throws ProviderError.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const Prompt& prompt) = 0;
};

/// Serves <dir>/<problem_id>.txt.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(std::string dir) : dir_(std::move(dir)) {}
  std::string complete(const Prompt& prompt) override;

 private:
  std::string dir_;
};

/// POSTs {model, messages, temperature?, reasoning_effort?} with a bearer
/// token taken from the environment.
class HttpChatProvider : public Provider {
 public:
  explicit HttpChatProvider(ProviderConfig cfg);
  ~HttpChatProvider() override;
  std::string complete(const Prompt& prompt) override;

  /// The JSON body that would be sent for `prompt`.
  std::string request_body(const Prompt& prompt) const;

 private:
  struct Gate;
  ProviderConfig cfg_;
  std::unique_ptr<Gate> gate_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg);

/// Calls provider.complete, retrying ProviderErrors up to `max_retries` more
/// times with doubling backoff. The last error is rethrown.
std::string complete_with_retries(Provider& provider, const Prompt& prompt, int max_retries, int backoff_ms = 0);

struct TranslationResult {
  std::string raw_response;
  std::string model_text;
  std::string spec_text;
  std::optional<SmvModel> model;
  std::optional<LtlFormula> spec;
  std::optional<ParseError> failure;
  double latency = 0.0;  // seconds, provider round trip included

  bool parsed() const { return model.has_value(); }
};

/// Extraction and parsing of a raw response; never throws on bad text.
/// Positions in `failure` refer to model_text followed by a newline and
/// spec_text.
TranslationResult interpret_response(std::string raw);

struct TranslateOptions {
  int max_retries = 0;
  int retry_backoff_ms = 0;
  const Exemplar* exemplar = nullptr;  // default_exemplar() when null
};

/// build_prompt -> provider -> interpret_response. Provider failures after
/// retries propagate as ProviderError.
TranslationResult translate(std::string_view nl_plan, const std::string& problem_id, Provider& provider,
                            const TranslateOptions& options = {});
TranslationResult translate(std::string_view nl_plan, const std::string& problem_id, const ProviderConfig& cfg);

/// Deterministic JSON without latency.
std::string to_json(const TranslationResult& r);

}  // namespace plancheck
