#include "plancheck/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plancheck/bmc.hpp"
#include "plancheck/eval.hpp"
#include "plancheck/plan.hpp"
#include "plancheck/translator.hpp"

namespace plancheck {

const char* const kVersion = "0.1.0";

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Input/output failures map to the usage exit code.
struct IoError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

ordered_json error_json(const ParseError& e) {
  return {{"line", e.pos().line}, {"column", e.pos().column}, {"message", e.detail()}};
}

ProviderConfig read_provider_config(const std::string& path) {
  auto cfg = load_provider_config(read_file(path));
  // Transcript directories are relative to the config file.
  if (cfg.kind == ProviderKind::Replay && fs::path(cfg.transcript_dir).is_relative()) {
    cfg.transcript_dir = (fs::path(path).parent_path() / cfg.transcript_dir).lexically_normal().string();
  }
  return cfg;
}

struct Cli {
  std::ostream& out;
  std::ostream& err;
  bool json = false;

  int parse(const std::string& file) {
    const auto text = read_file(file);
    SmvModel m;
    try {
      m = parse_model(text);
    } catch (const ParseError& e) {
      return parse_failure(file, e);
    }
    const auto diags = check_semantics(m);
    for (const auto& d : diags) {
      err << file << ":" << d.pos.line << ":" << d.pos.column << ": "
          << (d.severity == Severity::Error ? "error: " : "warning: ") << d.message << "\n";
    }
    if (json) {
      ordered_json j;
      j["ok"] = !has_errors(diags);
      j["variables"] = m.vars.size();
      j["specs"] = ordered_json::array();
      for (const auto& s : m.ltlspecs) j["specs"].push_back(to_string(s));
      j["diagnostics"] = ordered_json::array();
      for (const auto& d : diags) {
        j["diagnostics"].push_back({{"severity", d.severity == Severity::Error ? "error" : "warning"},
                                    {"line", d.pos.line},
                                    {"column", d.pos.column},
                                    {"message", d.message}});
      }
      out << j.dump(2) << "\n";
    } else if (!has_errors(diags)) {
      out << pretty_print(m);
    }
    return has_errors(diags) ? kExitUnknown : kExitOk;
  }

  int parse_failure(const std::string& file, const ParseError& e) {
    err << file << ":" << e.what() << "\n";
    if (json) out << ordered_json{{"ok", false}, {"error", error_json(e)}}.dump(2) << "\n";
    return kExitUnknown;
  }

  int check(const std::string& file, std::optional<std::size_t> bound, const std::string& trace_out, bool fresh) {
    const auto text = read_file(file);
    SmvModel m;
    try {
      m = parse_model(text);
      for (const auto& d : check_semantics(m)) {
        if (d.severity == Severity::Error) throw ParseError(d.message, d.pos);
        err << file << ":" << d.pos.line << ":" << d.pos.column << ": warning: " << d.message << "\n";
      }
    } catch (const ParseError& e) {
      return parse_failure(file, e);
    }
    if (m.ltlspecs.empty()) err << file << ": no LTLSPEC; checking TRUE\n";
    const auto k = compile(m);
    CheckOptions opts;
    if (bound) opts.max_bound = *bound;
    opts.incremental = !fresh;
    const auto outcome = check_spec(k, combined_spec(k), opts);

    if (outcome.trace && !trace_out.empty()) write_file(trace_out, trace_to_json(k, *outcome.trace) + "\n");
    if (json) {
      ordered_json j;
      j["status"] = outcome.status == CheckStatus::Holds                 ? "holds"
                    : outcome.status == CheckStatus::CounterexampleFound ? "violated"
                                                                         : "bound_exhausted";
      j["bound"] = outcome.bound;
      j["complete"] = outcome.complete;
      j["vacuous"] = outcome.vacuous;
      j["message"] = describe(outcome);
      j["trace"] = outcome.trace ? ordered_json::parse(trace_to_json(k, *outcome.trace)) : ordered_json();
      out << j.dump(2) << "\n";
    } else {
      out << describe(outcome) << "\n";
      if (outcome.trace && trace_out.empty()) {
        for (std::size_t i = 0; i < outcome.trace->states.size(); ++i) {
          out << "  " << i << ": " << k.format_state(outcome.trace->states[i]) << "\n";
        }
        if (outcome.trace->loop_back) out << "  loops back to " << *outcome.trace->loop_back << "\n";
      }
    }
    switch (outcome.status) {
      case CheckStatus::Holds:
        return kExitOk;
      case CheckStatus::CounterexampleFound:
        return kExitViolated;
      case CheckStatus::BoundExhausted:
        return kExitUnknown;
    }
    return kExitUnknown;
  }

  int encode(const std::string& in, const std::string& out_path) {
    const auto p = load_problem(read_file(in));
    const auto text = pretty_print(encode_plan(p).model);
    if (out_path.empty()) {
      out << text;
    } else {
      write_file(out_path, text);
    }
    return kExitOk;
  }

  int simulate(const std::string& in) {
    const auto p = load_problem(read_file(in));
    const auto v = simulate_plan(p);
    if (json) {
      ordered_json j{{"problem_id", p.problem_id}, {"verdict", to_string(v.kind)}, {"detail", v.detail}};
      j["failing_action"] = v.failing_action ? ordered_json(*v.failing_action) : ordered_json();
      out << j.dump(2) << "\n";
    } else {
      out << to_string(v.kind) << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
    }
    return v.kind == VerdictKind::Valid ? kExitOk : kExitViolated;
  }

  int translate_cmd(const std::string& in, const std::string& provider_path, std::string id, const std::string& out_path) {
    const auto nl = read_file(in);
    const auto cfg = read_provider_config(provider_path);
    if (id.empty()) id = fs::path(in).stem().string();
    const auto r = translate(nl, id, cfg);
    if (r.parsed() && !out_path.empty()) write_file(out_path, pretty_print(*r.model));
    if (json) {
      out << to_json(r) << "\n";
    } else if (r.parsed() && out_path.empty()) {
      out << pretty_print(*r.model);
    }
    if (!r.parsed()) {
      err << in << ": response did not parse: " << r.failure->what() << "\n";
      return kExitUnknown;
    }
    return kExitOk;
  }

  int bench(const std::string& dataset, const std::string& mode, const std::string& policy, const std::string& out_path,
            const std::string& provider_path, int jobs, std::optional<std::size_t> bound, bool no_timing,
            std::string model_name) {
    RunConfig cfg;
    try {
      cfg.mode = run_mode_from_string(mode);
      cfg.policy = unknown_policy_from_string(policy);
    } catch (const std::invalid_argument& e) {
      throw IoError(e.what());
    }
    const auto format = [&] {
      try {
        return report_format_for(out_path);
      } catch (const std::invalid_argument& e) {
        throw IoError(e.what());
      }
    }();
    cfg.parallelism = jobs;
    cfg.max_bound = bound;
    if (!provider_path.empty()) cfg.provider = read_provider_config(provider_path);
    const auto problems = load_dataset(read_file(dataset));
    if (model_name.empty()) {
      model_name = !cfg.provider || cfg.mode == RunMode::FormalDirect ? "-"
                   : cfg.provider->kind == ProviderKind::Replay      ? "replay"
                                                                     : cfg.provider->model;
    }
    const auto report = build_report(run_dataset(problems, cfg), cfg, model_name);
    ReportOptions ro;
    ro.timing = !no_timing;
    write_file(out_path, emit_report(report, format, ro));

    std::size_t errored = 0;
    for (const auto& c : report.cases) errored += c.errored();
    if (json) out << emit_report(report, ReportFormat::Json, ro);
    err << "wrote " << out_path << " (" << report.cases.size() << " cases, " << errored << " errored)\n";
    return errored ? kExitProvider : kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plan verification with bounded model checking", "plancheck"};
  app.fallthrough();
  app.require_subcommand(1);
  Cli cli{out, err};
  app.add_flag("--json", cli.json, "Machine-readable output on stdout");
  app.set_version_flag("--version", std::string("plancheck ") + kVersion);

  std::string file, in, out_path, trace_out, provider, id, dataset, mode, policy, model_name;
  std::optional<std::size_t> bound;
  bool fresh = false, no_timing = false;
  int jobs = 1;

  auto* parse = app.add_subcommand("parse", "Parse and type-check a model, print it in canonical form");
  parse->add_option("file", file, "Model file")->required();

  auto* check = app.add_subcommand("check", "Model-check the LTLSPECs of a model");
  check->add_option("file", file, "Model file")->required();
  check->add_option("--bound", bound, "Largest bound to search (default 64)");
  check->add_option("--trace-out", trace_out, "Write a counterexample trace as JSON");
  check->add_flag("--fresh", fresh, "Rebuild the SAT instance at every bound");

  auto* encode = app.add_subcommand("encode-plan", "Encode a plan problem as a model");
  encode->add_option("--in", in, "Plan problem JSON")->required();
  encode->add_option("--out", out_path, "Model file to write (stdout if omitted)");

  auto* simulate = app.add_subcommand("simulate", "Validate a plan by executing it");
  simulate->add_option("--in", in, "Plan problem JSON")->required();

  auto* translate = app.add_subcommand("translate", "Ask a provider to turn a plan description into a model");
  translate->add_option("--in", in, "Plan description text")->required();
  translate->add_option("--provider", provider, "Provider config JSON")->required();
  translate->add_option("--id", id, "Problem id used for replay (default: input file stem)");
  translate->add_option("--out", out_path, "Model file to write");

  auto* bench = app.add_subcommand("bench", "Run a dataset and write a metrics report");
  bench->add_option("--dataset", dataset, "JSONL dataset")->required();
  bench->add_option("--mode", mode, "formal_llm, formal_direct or direct_llm")->required();
  bench->add_option("--policy", policy, "exclude, as_valid or as_invalid")->default_val("exclude");
  bench->add_option("--out", out_path, "Report path; .md, .csv or .json")->required();
  bench->add_option("--provider", provider, "Provider config JSON (LLM modes)");
  bench->add_option("--jobs", jobs, "Cases evaluated concurrently")->default_val(1)->check(CLI::PositiveNumber);
  bench->add_option("--bound", bound, "Largest bound to search (default 64)");
  bench->add_flag("--no-timing", no_timing, "Leave timings out so reports are byte-stable");
  bench->add_option("--model-name", model_name, "Model column of the report");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "plancheck " << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*parse) return cli.parse(file);
    if (*check) return cli.check(file, bound, trace_out, fresh);
    if (*encode) return cli.encode(in, out_path);
    if (*simulate) return cli.simulate(in);
    if (*translate) return cli.translate_cmd(in, provider, id, out_path);
    if (*bench) return cli.bench(dataset, mode, policy, out_path, provider, jobs, bound, no_timing, model_name);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ProviderError& e) {
    err << "provider error: " << e.what() << "\n";
    return kExitProvider;
  }
  return kExitUsage;
}

}  // namespace plancheck
