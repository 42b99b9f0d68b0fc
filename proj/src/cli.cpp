#include "debate_forum/cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "debate_forum/bench.hpp"
#include "debate_forum/dataset.hpp"
#include "debate_forum/errors.hpp"
#include "debate_forum/prompts.hpp"

namespace debate_forum::cli {

namespace fs = std::filesystem;

namespace {

struct Prepared {
  LoadResult data;
  std::shared_ptr<const TemplateSet> templates;
  BackendKind backend = BackendKind::Scripted;
  BackendConfigs backends;
};

// Everything that can fail on bad input is checked here, before any output
// is written.
Prepared prepare(const CliConfig& c) {
  if (c.dataset.empty()) {
    throw ConfigError("no dataset given (use --dataset)");
  }
  if (!fs::is_regular_file(c.dataset)) {
    throw ConfigError("dataset not found: " + c.dataset);
  }
  Prepared p;
  p.backend = backend_from_string(c.backend);
  if (p.backend == BackendKind::Scripted) {
    ScriptedParams params;
    params.p_correct = c.p_correct;
    params.susceptibility = c.susceptibility;
    params.seed = c.seed;
    params.validate();
    p.backends.scripted = params;
  } else {
    RemoteBackendConfig remote;
    remote.base_url = c.base_url;
    remote.model_name = c.model;
    remote.max_attempts = c.max_attempts;
    remote.requests_per_minute = c.requests_per_minute;
    remote = RemoteBackendConfig::from_environment(remote);
    remote.validate();
    p.backends.remote = remote;
    p.backends.remote_client = std::make_shared<RemoteClient>(remote);
  }
  p.templates = std::make_shared<const TemplateSet>(
      TemplateSet::load(c.templates.empty() ? TemplateSet::default_path() : c.templates));
  p.data = load_truthfulqa_file(c.dataset);
  if (p.data.records.empty()) {
    throw ConfigError("dataset " + c.dataset + " has no usable records");
  }
  return p;
}

ExperimentConfig experiment_config(const CliConfig& c, const Prepared& p, std::optional<DebateConfig> debate) {
  ExperimentConfig e;
  e.label = debate ? debate->label() : kBaselineLabel;
  e.debate = debate;
  e.backend = p.backend;
  e.backends = p.backends;
  e.templates = p.templates;
  e.dataset_path = c.dataset;
  e.master_seed = c.seed;
  e.max_parallel = c.parallel;
  e.max_options = c.max_options;
  e.output_dir = (fs::path(c.out) / label_directory(e.label)).string();
  return e;
}

DebateConfig debate_config(const CliConfig& c, std::size_t n_personas) {
  DebateConfig d;
  d.n_personas = n_personas;
  d.n_saboteurs = c.n_saboteurs;
  d.n_rounds = c.n_rounds;
  d.seed = c.seed;
  d.temperature = c.temperature;
  d.max_reply_tokens = c.max_tokens;
  d.validate();
  return d;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << text;
}

// Runs one configuration and writes its directory; returns the report.
ScoreReport run_one(const CliConfig& c, const Prepared& p, std::optional<DebateConfig> debate,
                    const std::string& effective_config, std::ostream& err, bool& aborted) {
  const ExperimentConfig e = experiment_config(c, p, debate);
  e.validate();
  if (c.verbosity > 0) {
    err << "running " << e.label << " over " << p.data.records.size() << " records\n";
  }
  const ExperimentResult result = debate ? run_experiment(e, p.data.records) : run_baseline(e, p.data.records);
  write_text(fs::path(e.output_dir) / "effective_config.ini", effective_config);
  write_text(fs::path(e.output_dir) / "load_report.txt", p.data.report.to_text());
  err << e.label << ": " << format_accuracy_cell(result.report.overall) << " over "
      << result.report.overall.n_questions << " questions (" << result.report.skipped.size()
      << " skipped) -> " << e.output_dir << "\n";
  if (result.aborted) {
    err << "error: " << e.label << " aborted, " << result.failures
        << " backend failures exceeded 10% of the questions; partial outputs kept\n";
    aborted = true;
  }
  return result.report;
}

void write_comparison(const fs::path& dir, const std::vector<ScoreReport>& reports) {
  const ComparisonTable table = compare_reports(reports);
  fs::create_directories(dir);
  write_text(dir / "comparison.csv", table.to_csv());
  write_text(dir / "comparison.md", table.to_markdown());
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const TranscriptError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPartial;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

// Lines of a config echo that belong to one subcommand.
std::string section(const std::string& echo, const std::string& prefix) {
  std::istringstream in(echo);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.starts_with(prefix)) {
      out += line + "\n";
    }
  }
  return out;
}

}  // namespace

int cmd_run(const CliConfig& config, const std::string& effective_config, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(config);
    std::vector<DebateConfig> debates;
    if (config.sweep) {
      for (std::size_t n : {5, 4, 3}) {
        debates.push_back(debate_config(config, n));
      }
    } else {
      debates.push_back(debate_config(config, config.n_personas));
    }
    bool aborted = false;
    std::vector<ScoreReport> reports;
    if (config.sweep && config.with_baseline) {
      reports.push_back(run_one(config, p, std::nullopt, effective_config, err, aborted));
    }
    // Sweep configurations run smallest first; the comparison lists 5/1, 4/1, 3/1.
    std::vector<ScoreReport> forum(debates.size());
    for (std::size_t i = debates.size(); i-- > 0;) {
      forum[i] = run_one(config, p, debates[i], effective_config, err, aborted);
    }
    reports.insert(reports.end(), forum.begin(), forum.end());
    if (reports.size() >= 2) {
      write_comparison(config.out, reports);
    }
    return aborted ? kExitPartial : kExitOk;
  });
}

int cmd_baseline(const CliConfig& config, const std::string& effective_config, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(config);
    bool aborted = false;
    run_one(config, p, std::nullopt, effective_config, err, aborted);
    return aborted ? kExitPartial : kExitOk;
  });
}

int cmd_report(const std::vector<std::string>& directories, const std::string& out, std::ostream& err) {
  return guarded(err, [&] {
    if (directories.empty()) {
      throw ConfigError("report needs at least one experiment directory");
    }
    std::vector<ScoreReport> reports;
    for (const auto& dir : directories) {
      const fs::path transcripts = fs::path(dir) / "transcripts.jsonl";
      if (!fs::is_regular_file(transcripts)) {
        throw ConfigError("no transcripts.jsonl in " + dir);
      }
      ScoreReport report;
      try {
        report = retabulate_directory(dir);
      } catch (const TranscriptError& e) {
        throw TranscriptError(e.line(), std::string(transcripts.string()) + ": " +
                                            std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
      }
      write_text(fs::path(dir) / "report.csv", report_csv(report));
      write_text(fs::path(dir) / "report.md", report_markdown(report));
      reports.push_back(std::move(report));
    }
    if (reports.size() >= 2) {
      const fs::path target = out.empty() ? fs::path(directories.front()).parent_path() : fs::path(out);
      write_comparison(target.empty() ? fs::path(".") : target, reports);
    }
    return kExitOk;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial multi-agent debate forum over multiple-choice truthfulness questions"};
  app.set_config("--config", "", "Key-value config file; flags override its values");
  app.require_subcommand(1);

  CliConfig run_config;
  CliConfig baseline_config;
  auto add_experiment_options = [](CLI::App* sub, CliConfig& config) {
    sub->fallthrough();
    sub->add_option("--dataset", config.dataset, "TruthfulQA CSV file");
    sub->add_option("--backend", config.backend, "scripted or remote")
        ->check(CLI::IsMember({"scripted", "remote"}))
        ->capture_default_str();
    sub->add_option("--base-url", config.base_url, "OpenAI-compatible API base URL")->capture_default_str();
    sub->add_option("--model", config.model, "Remote model name")->capture_default_str();
    sub->add_option("--max-attempts", config.max_attempts, "Remote attempts per request")->capture_default_str();
    sub->add_option("--rpm", config.requests_per_minute, "Remote requests-per-minute cap")->capture_default_str();
    sub->add_option("--temperature", config.temperature, "Sampling temperature hint")->capture_default_str();
    sub->add_option("--max-tokens", config.max_tokens, "Reply length cap")->capture_default_str();
    sub->add_option("--p-correct", config.p_correct, "Scripted: initial correctness probability")
        ->capture_default_str();
    sub->add_option("--susceptibility", config.susceptibility, "Scripted: switch probability")
        ->capture_default_str();
    sub->add_option("--rounds", config.n_rounds, "Debate rounds")->capture_default_str();
    sub->add_option("--max-options", config.max_options, "Options per question")->capture_default_str();
    sub->add_option("--seed", config.seed, "Master seed")->capture_default_str();
    sub->add_option("--parallel", config.parallel, "Concurrent debates (0 = CPU count)")->capture_default_str();
    sub->add_option("--out", config.out, "Output directory")->capture_default_str();
    sub->add_option("--templates", config.templates, "Prompt template file (default: shipped file)");
    sub->add_flag("-v,--verbose", config.verbosity, "More diagnostics");
  };

  auto* run = app.add_subcommand("run", "Run one forum configuration, or the 3/1, 4/1, 5/1 sweep");
  add_experiment_options(run, run_config);
  run->add_option("--n", run_config.n_personas, "Personas per forum")->capture_default_str();
  run->add_option("--saboteurs", run_config.n_saboteurs, "Saboteurs per forum")->capture_default_str();
  run->add_flag("--sweep", run_config.sweep, "Run N = 3, 4, 5 on the same sampled questions");
  run->add_flag("--with-baseline", run_config.with_baseline, "With --sweep, also run the baseline");

  auto* baseline = app.add_subcommand("baseline", "Single-agent answering without debate");
  add_experiment_options(baseline, baseline_config);

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Rebuild reports from stored transcripts");
  report->add_option("directories", report_dirs, "Experiment directories")->required();
  report->add_option("--out", report_out, "Where comparison.csv goes (default: parent of the first directory)");

  std::vector<const char*> argv;
  argv.push_back("debate-forum");
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  if (run->parsed()) {
    return cmd_run(run_config, section(app.config_to_str(true, false), "run."), err);
  }
  if (baseline->parsed()) {
    return cmd_baseline(baseline_config, section(app.config_to_str(true, false), "baseline."), err);
  }
  return cmd_report(report_dirs, report_out, err);
}

}  // namespace debate_forum::cli
