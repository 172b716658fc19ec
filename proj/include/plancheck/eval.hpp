#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plancheck/plan.hpp"
#include "plancheck/translator.hpp"

namespace plancheck {

/// formal_llm: translate then check. formal_direct: encode_plan then check.
/// direct_llm: the model answers VALID or INVALID itself.
enum class RunMode { FormalLlm, FormalDirect, DirectLlm };
enum class UnknownPolicy { Exclude, AsValid, AsInvalid };

std::string to_string(RunMode m);
std::string to_string(UnknownPolicy p);
RunMode run_mode_from_string(std::string_view s);
UnknownPolicy unknown_policy_from_string(std::string_view s);

struct RunConfig {
  RunMode mode = RunMode::FormalDirect;
  UnknownPolicy policy = UnknownPolicy::Exclude;
  std::optional<std::size_t> max_bound;
  int parallelism = 1;
  std::optional<ProviderConfig> provider;

  /// Throws SchemaError if an LLM mode has no provider.
  void validate() const;
  CheckOptions check_options() const;
};

/// Verdict for one problem. LLM modes need `problem.nl` and a provider; when
/// `provider` is null one is built from cfg.provider. ProviderError propagates.
PlanVerdict run_case(const PlanProblem& problem, const RunConfig& cfg, Provider* provider = nullptr);

struct CaseResult {
  std::string problem_id;
  std::optional<PlanLabel> label;
  std::optional<PlanVerdict> verdict;  // absent when errored
  std::string error;                   // provider failure text, redacted

  bool errored() const { return !verdict.has_value(); }
};

/// Runs every problem, up to cfg.parallelism at a time. Provider failures
/// mark the case errored instead of aborting the run. Results come back
/// sorted by problem_id.
std::vector<CaseResult> run_dataset(const std::vector<PlanProblem>& problems, const RunConfig& cfg,
                                    Provider* provider = nullptr);

/// Positive class is Valid. `unknown` counts unknown verdicts under every
/// policy; predicted_* give the raw prediction distribution.
struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0, unknown = 0;
  std::size_t predicted_valid = 0, predicted_invalid = 0;

  std::size_t adjudicated() const { return tp + fp + tn + fn; }
  std::size_t total() const { return predicted_valid + predicted_invalid + unknown; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

bool is_unknown(VerdictKind k);

ConfusionCounts apply_unknown_policy(std::span<const VerdictKind> verdicts, std::span<const PlanLabel> labels,
                                     UnknownPolicy policy);

/// Harmonic mean; works on fractions or percentages alike.
double f1_score(double precision, double recall);

/// Ratios are fractions in [0, 1]; nullopt marks an undefined value.
struct MetricsReport {
  ConfusionCounts counts;
  double valid_rate = 0, invalid_rate = 0, unknown_rate = 0;
  std::optional<double> accuracy, precision, recall, f1;
  std::optional<double> mean_time;  // seconds per case
};

MetricsReport compute_metrics(const ConfusionCounts& counts, std::optional<double> mean_time = std::nullopt);

struct Report {
  std::string model;     // provider model name, "replay", or "-"
  std::string approach;  // One-shot, w/o FV, Direct encoding
  UnknownPolicy policy = UnknownPolicy::Exclude;
  MetricsReport metrics;
  std::vector<CaseResult> cases;  // sorted by problem_id
  std::size_t unlabeled = 0;
};

/// Aggregates case results: errored and unlabeled cases are left out of the
/// metrics. Independent of the order of `cases`.
Report build_report(std::vector<CaseResult> cases, const RunConfig& cfg, std::string model_name);

enum class ReportFormat { Markdown, Csv, Json };

/// From a file extension: .md, .csv, .json. Throws std::invalid_argument.
ReportFormat report_format_for(std::string_view path);

struct ReportOptions {
  bool timing = true;  // false renders the Time column as "-" for stable output
};

std::string emit_report(const Report& r, ReportFormat fmt, const ReportOptions& options = {});

/// Minimal RFC 4180 reader/writer used for the csv report.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string write_csv(const std::vector<std::vector<std::string>>& rows);

}  // namespace plancheck
