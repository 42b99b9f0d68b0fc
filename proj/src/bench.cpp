#include "debate_forum/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "debate_forum/errors.hpp"
#include "debate_forum/protocol.hpp"
#include "debate_forum/rng.hpp"
#include "debate_forum/transcript_io.hpp"

namespace debate_forum {

namespace fs = std::filesystem;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string column_name(const std::string& label) {
  return label == kBaselineLabel ? "Baseline" : label;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << content;
}

using QuestionRunner = std::function<QuestionOutcome(const QARecord&, const MCQuestion&)>;

ExperimentResult drive(const ExperimentConfig& config, const std::vector<QARecord>& records,
                       const QuestionRunner& run_question) {
  const std::size_t n = records.size();
  std::vector<std::optional<QuestionOutcome>> slots(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::atomic<bool> stop{false};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto worker = [&]() {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      try {
        const QARecord& rec = records[i];
        QuestionOutcome outcome;
        try {
          const MCQuestion q = sample_mcq(rec, question_seed(config.master_seed, rec.id), config.max_options);
          outcome = run_question(rec, q);
        } catch (const SampleError&) {
          outcome.source_id = rec.id;
          outcome.category = rec.category;
          outcome.kind = OutcomeKind::Skipped;
          outcome.reason = "no_distractors";
        }
        if (outcome.kind == OutcomeKind::Failed && (failures.fetch_add(1) + 1) * 10 > n) {
          stop.store(true);
        }
        slots[i] = std::move(outcome);
      } catch (...) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) {
          fatal = std::current_exception();
        }
        stop.store(true);
      }
    }
  };

  std::size_t threads = config.max_parallel;
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (fatal) {
    std::rethrow_exception(fatal);
  }

  ExperimentResult result;
  result.failures = failures.load();
  result.aborted = result.failures * 10 > n;
  result.outcomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      result.outcomes.push_back(std::move(*slots[i]));
    } else {
      QuestionOutcome o;
      o.source_id = records[i].id;
      o.category = records[i].category;
      o.kind = OutcomeKind::Skipped;
      o.reason = "aborted";
      result.outcomes.push_back(std::move(o));
    }
  }
  result.report = tabulate(result.outcomes, config.label, config.master_seed);
  result.report.timestamp = utc_timestamp();
  if (!config.output_dir.empty()) {
    write_experiment_outputs(config.output_dir, result);
  }
  return result;
}

QuestionOutcome outcome_from(const MCQuestion& q, std::function<DebateResult()> body) {
  QuestionOutcome o;
  o.source_id = q.source_id;
  o.category = q.category;
  try {
    DebateResult r = body();
    o.kind = OutcomeKind::Scored;
    o.correct = r.verdict.correct;
    o.transcript = std::move(r.transcript);
  } catch (const VerdictError& e) {
    o.kind = OutcomeKind::Unparseable;
    o.transcript = e.transcript();
  } catch (const DebateError& e) {
    o.kind = OutcomeKind::Failed;
    o.reason = "backend_failure";
    o.detail = e.what();
    o.transcript = e.partial();
  }
  return o;
}

BackendConfigs experiment_backends(const ExperimentConfig& config) {
  BackendConfigs b = config.backends;
  if (b.scripted) {
    b.scripted->seed = config.master_seed;
  }
  if (config.backend == BackendKind::Remote && !b.remote_client) {
    if (!b.remote) {
      throw ConfigError("remote backend selected without remote configuration");
    }
    b.remote_client = std::make_shared<RemoteClient>(*b.remote);
  }
  return b;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!templates) {
    throw ConfigError("experiment has no prompt templates");
  }
  if (max_options < 2) {
    throw ConfigError("max_options must be at least 2");
  }
  if (debate) {
    debate->validate();
    if (label != debate->label()) {
      throw ConfigError("label \"" + label + "\" does not match debate configuration " + debate->label());
    }
  } else if (label != kBaselineLabel) {
    throw ConfigError("an experiment without a debate configuration must be labeled \"baseline\"");
  }
  if (backend == BackendKind::Scripted) {
    if (!backends.scripted) {
      throw ConfigError("scripted backend selected without scripted parameters");
    }
    backends.scripted->validate();
  } else if (!backends.remote_client) {
    if (!backends.remote) {
      throw ConfigError("remote backend selected without remote configuration");
    }
    backends.remote->validate();
  }
}

std::string label_directory(const std::string& label) {
  std::string out = label;
  std::replace(out.begin(), out.end(), '/', '-');
  return out;
}

std::uint64_t question_seed(std::uint64_t master_seed, const std::string& record_id) {
  return derive_seed(master_seed, "question:" + record_id);
}

double CategoryScore::accuracy() const {
  return n_questions == 0 ? 0.0 : static_cast<double>(n_correct) / static_cast<double>(n_questions);
}

std::map<std::string, std::size_t> ScoreReport::skipped_by_reason() const {
  std::map<std::string, std::size_t> out;
  for (const auto& s : skipped) {
    ++out[s.reason];
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<QARecord>& records) {
  if (!config.debate) {
    throw ConfigError("run_experiment needs a debate configuration; use run_baseline for the baseline");
  }
  config.validate();
  if (records.empty()) {
    throw ConfigError("no records to run");
  }
  const BackendConfigs backends = experiment_backends(config);
  const DebateConfig& debate = *config.debate;
  const std::string prefix = label_directory(config.label) + ":";

  return drive(config, records, [&](const QARecord&, const MCQuestion& q) {
    const std::string debate_id = prefix + q.source_id;
    DebateConfig dc = debate;
    dc.seed = derive_seed(config.master_seed, "roles:" + debate_id);
    Rng role_rng(dc.seed);
    const std::vector<Persona> personas = assign_roles(dc, role_rng);
    std::vector<std::unique_ptr<Agent>> owned;
    std::vector<Agent*> agents;
    for (const auto& p : personas) {
      owned.push_back(make_agent(p, config.backend, backends, debate_id));
      agents.push_back(owned.back().get());
    }
    return outcome_from(q, [&] { return run_debate(q, personas, agents, dc, *config.templates, debate_id); });
  });
}

ExperimentResult run_baseline(const ExperimentConfig& config, const std::vector<QARecord>& records) {
  if (config.debate) {
    throw ConfigError("run_baseline takes no debate configuration");
  }
  config.validate();
  if (records.empty()) {
    throw ConfigError("no records to run");
  }
  const BackendConfigs backends = experiment_backends(config);
  DebateConfig answer_settings;  // temperature / reply length only

  return drive(config, records, [&](const QARecord&, const MCQuestion& q) {
    const std::string debate_id = std::string(kBaselineLabel) + ":" + q.source_id;
    const Persona solo{0, "Debater-0", Role::FactBased};
    auto agent = make_agent(solo, config.backend, backends, debate_id);
    return outcome_from(q, [&] { return answer_directly(q, *agent, answer_settings, *config.templates, debate_id); });
  });
}

ScoreReport tabulate(const std::vector<QuestionOutcome>& outcomes, const std::string& label, std::uint64_t seed) {
  ScoreReport report;
  report.config_label = label;
  report.seed = seed;
  std::map<std::string, std::size_t> index;
  auto bucket = [&](const std::string& category) -> CategoryScore& {
    auto [it, inserted] = index.try_emplace(category, report.per_category.size());
    if (inserted) {
      report.per_category.push_back(CategoryScore{.category = category});
    }
    return report.per_category[it->second];
  };
  for (const auto& o : outcomes) {
    switch (o.kind) {
      case OutcomeKind::Scored: {
        CategoryScore& c = bucket(o.category);
        ++c.n_questions;
        c.n_correct += o.correct ? 1 : 0;
        break;
      }
      case OutcomeKind::Unparseable: {
        CategoryScore& c = bucket(o.category);
        ++c.n_questions;
        ++c.n_unparseable;
        break;
      }
      case OutcomeKind::Failed:
        bucket(o.category);
        report.skipped.push_back({o.source_id, o.reason});
        break;
      case OutcomeKind::Skipped:
        report.skipped.push_back({o.source_id, o.reason});
        break;
    }
  }
  for (const auto& c : report.per_category) {
    report.overall.n_questions += c.n_questions;
    report.overall.n_correct += c.n_correct;
    report.overall.n_unparseable += c.n_unparseable;
  }
  return report;
}

std::string format_percent(std::size_t correct, std::size_t total) {
  char buf[32];
  const double pct = total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  std::snprintf(buf, sizeof buf, "%.2f%%", pct);
  return buf;
}

std::string format_accuracy_cell(const CategoryScore& score) {
  if (score.empty()) {
    return "0.00% (empty)";
  }
  return format_percent(score.n_correct, score.n_questions);
}

std::string report_csv(const ScoreReport& report) {
  std::string out = "category,n_questions,n_correct,n_unparseable,accuracy\n";
  auto row = [&](const CategoryScore& c) {
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f", c.accuracy());
    out += csv_field(c.category) + "," + std::to_string(c.n_questions) + "," + std::to_string(c.n_correct) + "," +
           std::to_string(c.n_unparseable) + "," + acc + "\n";
  };
  row(report.overall);
  for (const auto& c : report.per_category) {
    row(c);
  }
  return out;
}

std::string report_markdown(const ScoreReport& report) {
  std::ostringstream out;
  out << "# Score report: " << column_name(report.config_label) << "\n\n";
  out << "- seed: " << report.seed << "\n";
  out << "- scored questions: " << report.overall.n_questions << "\n";
  out << "- unparseable verdicts (scored as incorrect): " << report.overall.n_unparseable << "\n";
  out << "- skipped questions: " << report.skipped.size() << "\n";
  for (const auto& [reason, count] : report.skipped_by_reason()) {
    out << "  - " << reason << ": " << count << "\n";
  }
  out << "\n| Category | Questions | Correct | Unparseable | Accuracy |\n";
  out << "|---|---:|---:|---:|---:|\n";
  auto row = [&](const CategoryScore& c) {
    out << "| " << c.category << " | " << c.n_questions << " | " << c.n_correct << " | " << c.n_unparseable
        << " | " << format_accuracy_cell(c) << " |\n";
  };
  row(report.overall);
  for (const auto& c : report.per_category) {
    row(c);
  }
  return out.str();
}

const std::vector<std::string>& ComparisonTable::row(const std::string& category) const {
  for (const auto& [name, cells] : rows) {
    if (name == category) {
      return cells;
    }
  }
  throw ReportError("no row for category \"" + category + "\"");
}

std::string ComparisonTable::to_csv() const {
  std::string out = "category";
  for (const auto& c : columns) {
    out += "," + csv_field(c);
  }
  out += "\n";
  for (const auto& [name, cells] : rows) {
    out += csv_field(name);
    for (const auto& cell : cells) {
      out += "," + csv_field(cell);
    }
    out += "\n";
  }
  return out;
}

std::string ComparisonTable::to_markdown() const {
  std::string out = "| Category |";
  std::string rule = "|---|";
  for (const auto& c : columns) {
    out += " " + c + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto& [name, cells] : rows) {
    out += "| " + name + " |";
    for (const auto& cell : cells) {
      out += " " + cell + " |";
    }
    out += "\n";
  }
  return out;
}

ComparisonTable compare_reports(const std::vector<ScoreReport>& reports) {
  if (reports.size() < 2) {
    throw ReportError("comparison needs at least two reports");
  }
  ComparisonTable table;
  for (const auto& r : reports) {
    const std::string name = column_name(r.config_label);
    if (std::find(table.columns.begin(), table.columns.end(), name) != table.columns.end()) {
      throw ReportError("duplicate report label \"" + r.config_label + "\"");
    }
    table.columns.push_back(name);
  }
  std::vector<std::string> categories;
  for (const auto& r : reports) {
    for (const auto& c : r.per_category) {
      if (std::find(categories.begin(), categories.end(), c.category) == categories.end()) {
        categories.push_back(c.category);
      }
    }
  }
  std::vector<std::string> overall;
  for (const auto& r : reports) {
    overall.push_back(format_accuracy_cell(r.overall));
  }
  table.rows.emplace_back("Overall", std::move(overall));
  for (const auto& category : categories) {
    std::vector<std::string> cells;
    for (const auto& r : reports) {
      auto it = std::find_if(r.per_category.begin(), r.per_category.end(),
                             [&](const CategoryScore& c) { return c.category == category; });
      cells.push_back(it == r.per_category.end() ? "No data" : format_accuracy_cell(*it));
    }
    table.rows.emplace_back(category, std::move(cells));
  }
  return table;
}

void write_experiment_outputs(const std::string& directory, const ExperimentResult& result) {
  const fs::path dir(directory);
  fs::create_directories(dir);
  ExperimentTranscripts t{result.report.config_label, result.report.seed, result.outcomes};
  write_file(dir / "transcripts.jsonl", transcripts_to_string(t));
  write_file(dir / "report.csv", report_csv(result.report));
  write_file(dir / "report.md", report_markdown(result.report));
  const nlohmann::ordered_json info{{"label", result.report.config_label},
                                    {"seed", result.report.seed},
                                    {"timestamp", result.report.timestamp},
                                    {"records", result.outcomes.size()},
                                    {"backend_failures", result.failures},
                                    {"aborted", result.aborted}};
  write_file(dir / "run_info.json", info.dump(2) + "\n");
}

ScoreReport retabulate_directory(const std::string& directory) {
  const ExperimentTranscripts t = read_transcripts_file((fs::path(directory) / "transcripts.jsonl").string());
  return tabulate(t.outcomes, t.label, t.seed);
}

}  // namespace debate_forum
