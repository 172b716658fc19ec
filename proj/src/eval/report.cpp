#include <cstdio>

#include <json.hpp>

#include "plancheck/eval.hpp"

namespace plancheck {

namespace {

const std::vector<std::string> kColumns = {"Model",    "Approach",  "Valid",  "Invalid", "Unk.",
                                           "Accuracy", "Precision", "Recall", "F1",      "Time"};

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string percent(std::optional<double> x) { return x ? fixed(100.0 * *x, 2) : "n/a"; }

std::vector<std::string> summary_row(const Report& r, const ReportOptions& o) {
  const auto& m = r.metrics;
  return {r.model,
          r.approach,
          percent(m.valid_rate),
          percent(m.invalid_rate),
          percent(m.unknown_rate),
          percent(m.accuracy),
          percent(m.precision),
          percent(m.recall),
          percent(m.f1),
          !o.timing ? "-" : m.mean_time ? fixed(*m.mean_time, 3) : "n/a"};
}

std::string label_name(const std::optional<PlanLabel>& l) {
  if (!l) return "-";
  return *l == PlanLabel::Valid ? "valid" : "invalid";
}

// Table cells cannot hold pipes or line breaks.
std::string cell(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string markdown_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + cell(c) + " |";
  return out + "\n";
}

std::string emit_markdown(const Report& r, const ReportOptions& o) {
  const auto& c = r.metrics.counts;
  std::string out = markdown_row(kColumns);
  out += "|-------|----------|------:|--------:|-----:|---------:|----------:|-------:|---:|-----:|\n";
  out += markdown_row(summary_row(r, o));
  out += "\nUnknown policy: " + to_string(r.policy) + "\n";
  out += "Counts: tp " + std::to_string(c.tp) + ", fp " + std::to_string(c.fp) + ", tn " + std::to_string(c.tn) +
         ", fn " + std::to_string(c.fn) + ", unknown " + std::to_string(c.unknown) + " (adjudicated " +
         std::to_string(c.adjudicated()) + " of " + std::to_string(c.total()) + ")\n";
  std::size_t errored = 0;
  for (const auto& k : r.cases) errored += k.errored();
  out += "Errored: " + std::to_string(errored) + ". Unlabeled: " + std::to_string(r.unlabeled) + ".\n";

  out += "\n## Cases\n\n";
  out += markdown_row({"Problem", "Label", "Verdict", "Detail"});
  out += "|---------|-------|---------|--------|\n";
  for (const auto& k : r.cases) {
    if (k.errored()) continue;
    out += markdown_row({k.problem_id, label_name(k.label), to_string(k.verdict->kind), k.verdict->detail});
  }
  if (errored) {
    out += "\n## Errored cases\n\n";
    for (const auto& k : r.cases) {
      if (k.errored()) out += "- " + cell(k.problem_id) + ": " + cell(k.error) + "\n";
    }
  }
  return out;
}

nlohmann::ordered_json optional_number(std::optional<double> x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json();
}

std::string emit_json(const Report& r, const ReportOptions& o) {
  const auto& m = r.metrics;
  const auto& c = m.counts;
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["approach"] = r.approach;
  j["policy"] = to_string(r.policy);
  j["counts"] = {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}, {"unknown", c.unknown}};
  j["rates"] = {{"valid", m.valid_rate}, {"invalid", m.invalid_rate}, {"unknown", m.unknown_rate}};
  j["accuracy"] = optional_number(m.accuracy);
  j["precision"] = optional_number(m.precision);
  j["recall"] = optional_number(m.recall);
  j["f1"] = optional_number(m.f1);
  j["mean_time"] = o.timing ? optional_number(m.mean_time) : nlohmann::ordered_json();
  j["unlabeled"] = r.unlabeled;
  j["cases"] = nlohmann::ordered_json::array();
  j["errored"] = nlohmann::ordered_json::array();
  for (const auto& k : r.cases) {
    if (k.errored()) {
      j["errored"].push_back({{"problem_id", k.problem_id}, {"error", k.error}});
      continue;
    }
    nlohmann::ordered_json row = {{"problem_id", k.problem_id},
                                  {"label", k.label ? nlohmann::ordered_json(label_name(k.label)) : nlohmann::ordered_json()},
                                  {"verdict", to_string(k.verdict->kind)},
                                  {"detail", k.verdict->detail}};
    if (k.verdict->failing_action) row["failing_action"] = *k.verdict->failing_action;
    j["cases"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace

ReportFormat report_format_for(std::string_view path) {
  auto ends_with = [&](std::string_view ext) {
    return path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext;
  };
  if (ends_with(".md")) return ReportFormat::Markdown;
  if (ends_with(".csv")) return ReportFormat::Csv;
  if (ends_with(".json")) return ReportFormat::Json;
  throw std::invalid_argument("cannot tell the report format of '" + std::string(path) + "' (.md, .csv, .json)");
}

std::string emit_report(const Report& r, ReportFormat fmt, const ReportOptions& options) {
  switch (fmt) {
    case ReportFormat::Markdown:
      return emit_markdown(r, options);
    case ReportFormat::Csv:
      return write_csv({kColumns, summary_row(r, options)});
    case ReportFormat::Json:
      return emit_json(r, options);
  }
  return {};
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += ch;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string write_csv(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const auto& f = row[i];
      if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out += f;
        continue;
      }
      out += '"';
      for (char c : f) out += c == '"' ? std::string("\"\"") : std::string(1, c);
      out += '"';
    }
    out += "\n";
  }
  return out;
}

}  // namespace plancheck
