#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "plancheck/translator.hpp"

namespace plancheck {

using nlohmann::json;

namespace {

const std::set<std::string> kEfforts = {"minimal", "low", "medium", "high"};

const std::set<std::string> kConfigFields = {"provider",     "endpoint",         "model",        "api_key_env",
                                             "temperature",  "reasoning_effort", "timeout_seconds",
                                             "max_retries",  "retry_backoff_ms", "max_in_flight", "transcript_dir"};

std::string redact(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto at = text.find(secret); at != std::string::npos; at = text.find(secret, at)) text.replace(at, secret.size(), "***");
  return text;
}

template <class T>
T read_field(const json& doc, const char* field, bool (json::*check)() const noexcept, const char* what) {
  const auto& v = doc.at(field);
  if (!(v.*check)()) throw SchemaError(field, std::string("expected ") + what);
  return v.get<T>();
}

}  // namespace

void ProviderConfig::validate() const {
  if (kind == ProviderKind::Replay) {
    if (transcript_dir.empty()) throw SchemaError("transcript_dir", "required for the replay provider");
  } else {
    if (endpoint.empty()) throw SchemaError("endpoint", "required for the http_chat provider");
    if (!std::regex_match(endpoint, std::regex("https?://[^/]+(/.*)?"))) {
      throw SchemaError("endpoint", "expected an http:// or https:// URL");
    }
    if (model.empty()) throw SchemaError("model", "required for the http_chat provider");
    if (api_key_env.empty()) throw SchemaError("api_key_env", "required for the http_chat provider");
  }
  if (reasoning_effort && !kEfforts.count(*reasoning_effort)) {
    throw SchemaError("reasoning_effort", "expected minimal, low, medium or high");
  }
  if (timeout_seconds <= 0) throw SchemaError("timeout_seconds", "must be positive");
  if (max_retries < 0) throw SchemaError("max_retries", "must not be negative");
  if (retry_backoff_ms < 0) throw SchemaError("retry_backoff_ms", "must not be negative");
  if (max_in_flight < 1) throw SchemaError("max_in_flight", "must be at least 1");
}

ProviderConfig load_provider_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("document", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("document", "expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (kConfigFields.count(key)) continue;
    std::string lower = key;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.find("key") != std::string::npos || lower.find("token") != std::string::npos ||
        lower.find("secret") != std::string::npos) {
      throw SchemaError(key, "secrets are not accepted in the config; name an environment variable in api_key_env");
    }
    throw SchemaError(key, "unknown field");
  }

  ProviderConfig cfg;
  if (!doc.contains("provider")) throw SchemaError("provider", "missing");
  const auto kind = read_field<std::string>(doc, "provider", &json::is_string, "a string");
  if (kind == "replay") {
    cfg.kind = ProviderKind::Replay;
  } else if (kind == "http_chat") {
    cfg.kind = ProviderKind::HttpChat;
  } else {
    throw SchemaError("provider", "expected \"http_chat\" or \"replay\"");
  }
  if (doc.contains("endpoint")) cfg.endpoint = read_field<std::string>(doc, "endpoint", &json::is_string, "a string");
  if (doc.contains("model")) cfg.model = read_field<std::string>(doc, "model", &json::is_string, "a string");
  if (doc.contains("api_key_env")) {
    cfg.api_key_env = read_field<std::string>(doc, "api_key_env", &json::is_string, "a string");
  }
  if (doc.contains("temperature") && !doc["temperature"].is_null()) {
    cfg.temperature = read_field<double>(doc, "temperature", &json::is_number, "a number");
  }
  if (doc.contains("reasoning_effort") && !doc["reasoning_effort"].is_null()) {
    cfg.reasoning_effort = read_field<std::string>(doc, "reasoning_effort", &json::is_string, "a string");
  }
  if (doc.contains("timeout_seconds")) {
    cfg.timeout_seconds = read_field<double>(doc, "timeout_seconds", &json::is_number, "a number");
  }
  if (doc.contains("max_retries")) {
    cfg.max_retries = read_field<int>(doc, "max_retries", &json::is_number_integer, "an integer");
  }
  if (doc.contains("retry_backoff_ms")) {
    cfg.retry_backoff_ms = read_field<int>(doc, "retry_backoff_ms", &json::is_number_integer, "an integer");
  }
  if (doc.contains("max_in_flight")) {
    cfg.max_in_flight = read_field<int>(doc, "max_in_flight", &json::is_number_integer, "an integer");
  }
  if (doc.contains("transcript_dir")) {
    cfg.transcript_dir = read_field<std::string>(doc, "transcript_dir", &json::is_string, "a string");
  }
  cfg.validate();
  return cfg;
}

std::string to_json(const ProviderConfig& cfg) {
  nlohmann::ordered_json j;
  j["provider"] = cfg.kind == ProviderKind::Replay ? "replay" : "http_chat";
  if (cfg.kind == ProviderKind::Replay) {
    j["transcript_dir"] = cfg.transcript_dir;
  } else {
    j["endpoint"] = cfg.endpoint;
    j["model"] = cfg.model;
    j["api_key_env"] = cfg.api_key_env;
    if (cfg.temperature) j["temperature"] = *cfg.temperature;
    if (cfg.reasoning_effort) j["reasoning_effort"] = *cfg.reasoning_effort;
  }
  j["timeout_seconds"] = cfg.timeout_seconds;
  j["max_retries"] = cfg.max_retries;
  j["retry_backoff_ms"] = cfg.retry_backoff_ms;
  j["max_in_flight"] = cfg.max_in_flight;
  return j.dump(2);
}

std::string ReplayProvider::complete(const Prompt& prompt) {
  const auto& id = prompt.problem_id;
  if (id.empty() || id.find('/') != std::string::npos || id.find('\\') != std::string::npos || id == "." || id == "..") {
    throw ProviderError("replay: unusable problem id '" + id + "'");
  }
  const auto path = std::filesystem::path(dir_) / (id + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProviderError("replay: no transcript " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct HttpChatProvider::Gate {
  explicit Gate(int n) : slots(n) {}
  std::counting_semaphore<1024> slots;
};

HttpChatProvider::HttpChatProvider(ProviderConfig cfg)
    : cfg_(std::move(cfg)), gate_(std::make_unique<Gate>(std::min(cfg_.max_in_flight, 1024))) {
  cfg_.validate();
}

HttpChatProvider::~HttpChatProvider() = default;

std::string HttpChatProvider::request_body(const Prompt& prompt) const {
  nlohmann::ordered_json body;
  body["model"] = cfg_.model;
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : prompt.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (cfg_.temperature) body["temperature"] = *cfg_.temperature;
  if (cfg_.reasoning_effort) body["reasoning_effort"] = *cfg_.reasoning_effort;
  return body.dump();
}

std::string HttpChatProvider::complete(const Prompt& prompt) {
  const char* raw_key = std::getenv(cfg_.api_key_env.c_str());
  if (!raw_key || !*raw_key) throw ProviderError("environment variable " + cfg_.api_key_env + " is not set");
  const std::string key = raw_key;

  std::smatch m;
  std::regex_match(cfg_.endpoint, m, std::regex("(https?://[^/]+)(/.*)?"));
  const std::string origin = m[1];
  const std::string path = m[2].matched ? std::string(m[2]) : "/";

  gate_->slots.acquire();
  struct Release {
    Gate& g;
    ~Release() { g.slots.release(); }
  } release{*gate_};

  httplib::Client client(origin);
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(cfg_.timeout_seconds * 1000));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const httplib::Headers headers = {{"Authorization", "Bearer " + key}};
  const auto res = client.Post(path, headers, request_body(prompt), "application/json");
  if (!res) {
    throw ProviderError(redact("request to " + cfg_.endpoint + " failed: " + httplib::to_string(res.error()), key));
  }
  if (res->status != 200) {
    throw ProviderError(redact("HTTP " + std::to_string(res->status) + " from " + cfg_.endpoint + ": " +
                                   res->body.substr(0, 200),
                               key));
  }
  try {
    const auto doc = json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProviderError("response from " + cfg_.endpoint + " has no choices[0].message.content");
  }
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg) {
  cfg.validate();
  if (cfg.kind == ProviderKind::Replay) return std::make_unique<ReplayProvider>(cfg.transcript_dir);
  return std::make_unique<HttpChatProvider>(cfg);
}

std::string complete_with_retries(Provider& provider, const Prompt& prompt, int max_retries, int backoff_ms) {
  for (int attempt = 0;; ++attempt) {
    try {
      return provider.complete(prompt);
    } catch (const ProviderError&) {
      if (attempt >= max_retries) throw;
      if (backoff_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms << std::min(attempt, 10)));
    }
  }
}

}  // namespace plancheck
