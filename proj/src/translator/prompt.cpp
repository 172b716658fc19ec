#include <algorithm>
#include <cctype>
#include <chrono>

#include <json.hpp>

#include "plancheck/translator.hpp"

namespace plancheck {

namespace {

const char* kSystem =
    "You turn plan descriptions into input for a symbolic model checker.\n"
    "Reply with one fenced code block and nothing else. The block holds a single\n"
    "`MODULE main` with VAR and ASSIGN sections followed by one LTLSPEC line.\n"
    "\n"
    "Modeling rules:\n"
    "- one boolean variable per fact, initialised from the starting situation;\n"
    "- a variable `stage` whose values name the plan steps in order (s0, s1, ...)\n"
    "  and end with `done`; each step moves to the next one and `done` stays put;\n"
    "- a boolean `ok` that starts TRUE and becomes FALSE for good when a step runs\n"
    "  while one of its preconditions is false;\n"
    "- a step's effects apply only at its own stage and only when its\n"
    "  preconditions hold;\n"
    "- the LTLSPEC says the run eventually reaches `done` with `ok` and the goal.\n"
    "\n"
    "Allowed syntax: `x : boolean;`, `x : {a, b};`, `init(x) := e;`,\n"
    "`next(x) := case g : e; ... TRUE : e; esac;`, operators ! & | = and the\n"
    "temporal operators X F G U. Use -- for comments.\n";

const char* kJudgeSystem =
    "You check plans. A plan is valid when every step's preconditions hold at the\n"
    "moment it runs and the goal holds after the last step.\n"
    "Answer with exactly one word: VALID or INVALID.\n";

const char* kExemplarPlan =
    "Facts: kettle_full, water_hot, tea_ready. At the start none of them hold.\n"
    "Actions:\n"
    "- fill-kettle: needs the kettle to be empty; afterwards kettle_full holds.\n"
    "- boil-water: needs kettle_full; afterwards water_hot holds.\n"
    "- pour-tea: needs water_hot; afterwards tea_ready holds and kettle_full no longer does.\n"
    "Plan: fill-kettle, boil-water, pour-tea.\n"
    "Goal: tea_ready.\n";

const char* kExemplarModel =
    "MODULE main\n"
    "VAR\n"
    "  -- s0 fill-kettle, s1 boil-water, s2 pour-tea, s3 all steps taken\n"
    "  stage : {s0, s1, s2, s3, done};\n"
    "  ok : boolean;\n"
    "  kettle_full : boolean;\n"
    "  water_hot : boolean;\n"
    "  tea_ready : boolean;\n"
    "ASSIGN\n"
    "  init(stage) := s0;\n"
    "  init(ok) := TRUE;\n"
    "  -- nothing holds at the start\n"
    "  init(kettle_full) := FALSE;\n"
    "  init(water_hot) := FALSE;\n"
    "  init(tea_ready) := FALSE;\n"
    "  next(stage) := case\n"
    "      stage = s0 : s1;\n"
    "      stage = s1 : s2;\n"
    "      stage = s2 : s3;\n"
    "      TRUE : done;\n"
    "    esac;\n"
    "  -- a step whose precondition fails spoils the run\n"
    "  next(ok) := case\n"
    "      stage = s0 & kettle_full : FALSE;\n"
    "      stage = s1 & !kettle_full : FALSE;\n"
    "      stage = s2 & !water_hot : FALSE;\n"
    "      TRUE : ok;\n"
    "    esac;\n"
    "  next(kettle_full) := case\n"
    "      stage = s0 & !kettle_full : TRUE;\n"
    "      stage = s2 & water_hot : FALSE;\n"
    "      TRUE : kettle_full;\n"
    "    esac;\n"
    "  next(water_hot) := case\n"
    "      stage = s1 & kettle_full : TRUE;\n"
    "      TRUE : water_hot;\n"
    "    esac;\n"
    "  next(tea_ready) := case\n"
    "      stage = s2 & water_hot : TRUE;\n"
    "      TRUE : tea_ready;\n"
    "    esac;\n"
    "LTLSPEC F (stage = done & ok & tea_ready);\n";

const char* kExemplarProblem = R"({
  "problem_id": "exemplar",
  "fluents": ["kettle_full", "water_hot", "tea_ready"],
  "actions_catalog": {
    "fill-kettle": {"preconditions": {"kettle_full": false}, "effects": {"kettle_full": true}},
    "boil-water": {"preconditions": {"kettle_full": true}, "effects": {"water_hot": true}},
    "pour-tea": {"preconditions": {"water_hot": true}, "effects": {"tea_ready": true, "kettle_full": false}}
  },
  "plan": ["fill-kettle", "boil-water", "pour-tea"],
  "goal": {"tea_ready": true},
  "label": "valid"
})";

std::string user_turn(std::string_view nl_plan) { return "Plan description:\n" + std::string(nl_plan); }

std::string fenced(const std::string& body) { return "```smv\n" + body + "```"; }

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Fenced blocks in order of appearance; an unterminated block runs to the end.
std::vector<std::string> fenced_blocks(std::string_view text) {
  std::vector<std::string> blocks;
  std::optional<std::string> open;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl == std::string_view::npos ? text.size() : nl + 1);
    text.remove_prefix(line.size());
    const bool fence = starts_with(trim(line), "```");
    if (open) {
      if (fence) {
        blocks.push_back(std::move(*open));
        open.reset();
      } else {
        *open += line;
      }
    } else if (fence) {
      open.emplace();
    }
  }
  if (open) blocks.push_back(std::move(*open));
  return blocks;
}

SourcePos end_of(std::string_view text) {
  SourcePos pos;
  for (char c : text) {
    ++pos.offset;
    if (c == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

}  // namespace

const Exemplar& default_exemplar() {
  static const Exemplar ex{kExemplarPlan, kExemplarModel};
  return ex;
}

PlanProblem exemplar_problem() { return load_problem(kExemplarProblem); }

std::string Prompt::render() const {
  std::string out;
  for (const auto& m : messages) out += "=== " + m.role + " ===\n" + m.content + "\n";
  return out;
}

Prompt build_prompt(std::string_view nl_plan, const Exemplar& exemplar, std::string problem_id) {
  Prompt p;
  p.problem_id = std::move(problem_id);
  p.messages = {{"system", kSystem},
                {"user", user_turn(exemplar.plan_text)},
                {"assistant", fenced(exemplar.model_text)},
                {"user", user_turn(nl_plan)}};
  return p;
}

Prompt build_judge_prompt(std::string_view nl_plan, std::string problem_id) {
  Prompt p;
  p.problem_id = std::move(problem_id);
  p.messages = {{"system", kJudgeSystem}, {"user", user_turn(nl_plan)}};
  return p;
}

std::optional<bool> parse_judgement(std::string_view response) {
  auto s = trim(response);
  while (!s.empty() && (s.front() == '*' || s.front() == '_' || s.front() == '`')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '_' || s.back() == '`' || s.back() == '.')) s.remove_suffix(1);
  std::string word(s);
  std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::toupper(c); });
  if (word == "VALID") return true;
  if (word == "INVALID") return false;
  return std::nullopt;
}

Artifacts extract_artifacts(std::string_view response) {
  const auto blocks = fenced_blocks(response);
  const auto model_block =
      std::find_if(blocks.begin(), blocks.end(), [](const std::string& b) { return b.find("MODULE main") != std::string::npos; });
  if (model_block == blocks.end()) throw ExtractError("no model block");
  Artifacts a;
  const auto cut = model_block->find("LTLSPEC");
  if (cut != std::string::npos) {
    a.model_text = model_block->substr(0, cut);
    a.spec_text = model_block->substr(cut);
    return a;
  }
  a.model_text = *model_block;
  const auto spec_block = std::find_if(std::next(model_block), blocks.end(),
                                       [](const std::string& b) { return b.find("LTLSPEC") != std::string::npos; });
  if (spec_block != blocks.end()) a.spec_text = *spec_block;
  return a;
}

TranslationResult interpret_response(std::string raw) {
  TranslationResult r;
  r.raw_response = std::move(raw);
  try {
    auto a = extract_artifacts(r.raw_response);
    r.model_text = std::move(a.model_text);
    r.spec_text = std::move(a.spec_text);
  } catch (const ExtractError& e) {
    r.failure = ParseError(e.what(), SourcePos{});
    return r;
  }
  const std::string text = r.model_text + "\n" + r.spec_text;
  try {
    auto m = parse_model(text);
    if (m.ltlspecs.empty()) throw ParseError("no LTLSPEC in response", end_of(text));
    LtlFormula spec = m.ltlspecs.front();
    for (std::size_t i = 1; i < m.ltlspecs.size(); ++i) spec = LtlFormula::conj(spec, m.ltlspecs[i]);
    r.model = std::move(m);
    r.spec = spec;
  } catch (const ParseError& e) {
    r.failure = e;
  } catch (const std::exception& e) {
    r.failure = ParseError(e.what(), SourcePos{});
  }
  return r;
}

TranslationResult translate(std::string_view nl_plan, const std::string& problem_id, Provider& provider,
                            const TranslateOptions& options) {
  const auto prompt = build_prompt(nl_plan, options.exemplar ? *options.exemplar : default_exemplar(), problem_id);
  const auto start = std::chrono::steady_clock::now();
  auto raw = complete_with_retries(provider, prompt, options.max_retries, options.retry_backoff_ms);
  auto r = interpret_response(std::move(raw));
  r.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

TranslationResult translate(std::string_view nl_plan, const std::string& problem_id, const ProviderConfig& cfg) {
  const auto provider = make_provider(cfg);
  TranslateOptions options;
  options.max_retries = cfg.max_retries;
  options.retry_backoff_ms = cfg.retry_backoff_ms;
  return translate(nl_plan, problem_id, *provider, options);
}

std::string to_json(const TranslationResult& r) {
  nlohmann::ordered_json j;
  j["raw_response"] = r.raw_response;
  j["model_text"] = r.model_text;
  j["spec_text"] = r.spec_text;
  j["parsed"] = r.parsed();
  j["model"] = r.model ? nlohmann::ordered_json(pretty_print(*r.model)) : nlohmann::ordered_json();
  j["spec"] = r.spec ? nlohmann::ordered_json(to_string(*r.spec)) : nlohmann::ordered_json();
  if (r.failure) {
    j["failure"] = {{"line", r.failure->pos().line},
                    {"column", r.failure->pos().column},
                    {"message", r.failure->detail()}};
  } else {
    j["failure"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace plancheck
