#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>

#include "plancheck/eval.hpp"

namespace plancheck {

namespace {

bool needs_provider(RunMode m) { return m != RunMode::FormalDirect; }

const std::string& nl_of(const PlanProblem& p) {
  if (!p.nl) throw SchemaError("nl", "problem " + p.problem_id + " has no natural-language description");
  return *p.nl;
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::FormalLlm:
      return "formal_llm";
    case RunMode::FormalDirect:
      return "formal_direct";
    case RunMode::DirectLlm:
      return "direct_llm";
  }
  return "formal_direct";
}

std::string to_string(UnknownPolicy p) {
  switch (p) {
    case UnknownPolicy::Exclude:
      return "exclude";
    case UnknownPolicy::AsValid:
      return "as_valid";
    case UnknownPolicy::AsInvalid:
      return "as_invalid";
  }
  return "exclude";
}

RunMode run_mode_from_string(std::string_view s) {
  for (auto m : {RunMode::FormalLlm, RunMode::FormalDirect, RunMode::DirectLlm}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(s) + "' (formal_llm, formal_direct, direct_llm)");
}

UnknownPolicy unknown_policy_from_string(std::string_view s) {
  for (auto p : {UnknownPolicy::Exclude, UnknownPolicy::AsValid, UnknownPolicy::AsInvalid}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown policy '" + std::string(s) + "' (exclude, as_valid, as_invalid)");
}

void RunConfig::validate() const {
  if (needs_provider(mode) && !provider) throw SchemaError("provider", to_string(mode) + " needs a provider config");
  if (provider) provider->validate();
  if (parallelism < 1) throw SchemaError("parallelism", "must be at least 1");
}

CheckOptions RunConfig::check_options() const {
  CheckOptions o;
  if (max_bound) o.max_bound = *max_bound;
  return o;
}

PlanVerdict run_case(const PlanProblem& problem, const RunConfig& cfg, Provider* provider) {
  if (cfg.mode == RunMode::FormalDirect) return verify_plan(problem, cfg.check_options());

  std::unique_ptr<Provider> owned;
  if (!provider) {
    cfg.validate();
    owned = make_provider(*cfg.provider);
    provider = owned.get();
  }
  const int retries = cfg.provider ? cfg.provider->max_retries : 0;
  const int backoff = cfg.provider ? cfg.provider->retry_backoff_ms : 0;
  const auto& nl = nl_of(problem);

  if (cfg.mode == RunMode::DirectLlm) {
    const auto start = std::chrono::steady_clock::now();
    const auto answer = complete_with_retries(*provider, build_judge_prompt(nl, problem.problem_id), retries, backoff);
    PlanVerdict v;
    const auto judged = parse_judgement(answer);
    if (judged) {
      v.kind = *judged ? VerdictKind::Valid : VerdictKind::Invalid;
      v.detail = *judged ? "answered VALID" : "answered INVALID";
    } else {
      v.kind = VerdictKind::UnknownParse;
      v.parse_error = ParseError("expected VALID or INVALID", SourcePos{});
      v.detail = "expected VALID or INVALID";
    }
    v.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return v;
  }

  TranslateOptions topts;
  topts.max_retries = retries;
  topts.retry_backoff_ms = backoff;
  const auto t = translate(nl, problem.problem_id, *provider, topts);
  PlanVerdict v;
  if (!t.parsed()) {
    v.kind = VerdictKind::UnknownParse;
    v.parse_error = t.failure;
    v.detail = t.failure->what();
  } else {
    v = verify_model(*t.model, *t.spec, cfg.check_options());
  }
  v.wall_time += t.latency;
  return v;
}

std::vector<CaseResult> run_dataset(const std::vector<PlanProblem>& problems, const RunConfig& cfg, Provider* provider) {
  cfg.validate();
  std::unique_ptr<Provider> owned;
  if (needs_provider(cfg.mode)) {
    for (const auto& p : problems) nl_of(p);
    if (!provider) {
      owned = make_provider(*cfg.provider);
      provider = owned.get();
    }
  }

  std::vector<CaseResult> results(problems.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < problems.size(); i = next++) {
      const auto& p = problems[i];
      auto& r = results[i];
      r.problem_id = p.problem_id;
      r.label = p.label;
      try {
        r.verdict = run_case(p, cfg, provider);
      } catch (const ProviderError& e) {
        r.error = e.what();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::min<int>(cfg.parallelism, static_cast<int>(std::max<std::size_t>(problems.size(), 1))));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(results.begin(), results.end(),
                   [](const CaseResult& a, const CaseResult& b) { return a.problem_id < b.problem_id; });
  return results;
}

bool is_unknown(VerdictKind k) { return k == VerdictKind::UnknownParse || k == VerdictKind::UnknownBound; }

ConfusionCounts apply_unknown_policy(std::span<const VerdictKind> verdicts, std::span<const PlanLabel> labels,
                                     UnknownPolicy policy) {
  if (verdicts.size() != labels.size()) throw std::invalid_argument("verdicts and labels differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    VerdictKind v = verdicts[i];
    if (is_unknown(v)) {
      ++c.unknown;
      if (policy == UnknownPolicy::Exclude) continue;
      v = policy == UnknownPolicy::AsValid ? VerdictKind::Valid : VerdictKind::Invalid;
    } else if (v == VerdictKind::Valid) {
      ++c.predicted_valid;
    } else {
      ++c.predicted_invalid;
    }
    const bool positive = labels[i] == PlanLabel::Valid;
    if (v == VerdictKind::Valid) {
      ++(positive ? c.tp : c.fp);
    } else {
      ++(positive ? c.fn : c.tn);
    }
  }
  return c;
}

double f1_score(double precision, double recall) {
  if (precision + recall == 0) return 0;
  return 2 * precision * recall / (precision + recall);
}

MetricsReport compute_metrics(const ConfusionCounts& c, std::optional<double> mean_time) {
  MetricsReport r;
  r.counts = c;
  r.mean_time = mean_time;
  if (const auto total = c.total()) {
    r.valid_rate = static_cast<double>(c.predicted_valid) / static_cast<double>(total);
    r.invalid_rate = static_cast<double>(c.predicted_invalid) / static_cast<double>(total);
    r.unknown_rate = static_cast<double>(c.unknown) / static_cast<double>(total);
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = ratio(c.tp + c.tn, c.adjudicated());
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  if (r.precision && r.recall) r.f1 = f1_score(*r.precision, *r.recall);
  return r;
}

Report build_report(std::vector<CaseResult> cases, const RunConfig& cfg, std::string model_name) {
  std::stable_sort(cases.begin(), cases.end(), [](const CaseResult& a, const CaseResult& b) {
    if (a.problem_id != b.problem_id) return a.problem_id < b.problem_id;
    // Duplicate ids: order by content so the report does not depend on input order.
    const auto key = [](const CaseResult& c) {
      return std::make_tuple(c.label ? static_cast<int>(*c.label) : -1,
                             c.verdict ? static_cast<int>(c.verdict->kind) : -1,
                             c.verdict ? c.verdict->detail : c.error);
    };
    return key(a) < key(b);
  });

  Report r;
  r.model = std::move(model_name);
  r.approach = cfg.mode == RunMode::FormalLlm ? "One-shot" : cfg.mode == RunMode::DirectLlm ? "w/o FV" : "Encoder";
  r.policy = cfg.policy;

  std::vector<VerdictKind> verdicts;
  std::vector<PlanLabel> labels;
  double time = 0;
  for (const auto& c : cases) {
    if (c.errored()) continue;
    if (!c.label) {
      ++r.unlabeled;
      continue;
    }
    verdicts.push_back(c.verdict->kind);
    labels.push_back(*c.label);
    time += c.verdict->wall_time;
  }
  std::optional<double> mean;
  if (!verdicts.empty()) mean = time / static_cast<double>(verdicts.size());
  r.metrics = compute_metrics(apply_unknown_policy(verdicts, labels, cfg.policy), mean);
  r.cases = std::move(cases);
  return r;
}

}  // namespace plancheck
