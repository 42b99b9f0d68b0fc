#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "debate_forum/agents.hpp"
#include "debate_forum/dataset.hpp"
#include "debate_forum/debate_types.hpp"
#include "debate_forum/outcome.hpp"
#include "debate_forum/prompts.hpp"

namespace debate_forum {

inline constexpr const char* kBaselineLabel = "baseline";

struct ExperimentConfig {
  std::string label;                   // "N/S" or "baseline"
  std::optional<DebateConfig> debate;  // absent for the baseline
  BackendKind backend = BackendKind::Scripted;
  BackendConfigs backends;
  std::shared_ptr<const TemplateSet> templates;
  std::string dataset_path;  // provenance only
  std::uint64_t master_seed = 0;
  std::size_t max_parallel = 0;  // 0 = hardware concurrency
  std::size_t max_options = 5;
  std::string output_dir;  // empty = write nothing

  void validate() const;  // throws ConfigError
};

// "5/1" -> "5-1"; directory-safe form of a label.
std::string label_directory(const std::string& label);
// Seed of the MCQ sampled from `record_id`; shared by every configuration.
std::uint64_t question_seed(std::uint64_t master_seed, const std::string& record_id);

struct CategoryScore {
  std::string category;
  std::size_t n_questions = 0;
  std::size_t n_correct = 0;
  std::size_t n_unparseable = 0;

  // 0 for an empty denominator; check empty() to tell it apart.
  double accuracy() const;
  bool empty() const { return n_questions == 0; }
  bool operator==(const CategoryScore&) const = default;
};

struct SkippedQuestion {
  std::string source_id;
  std::string reason;
  bool operator==(const SkippedQuestion&) const = default;
};

struct ScoreReport {
  std::string config_label;
  CategoryScore overall{.category = "Overall"};
  std::vector<CategoryScore> per_category;  // first-appearance order
  std::vector<SkippedQuestion> skipped;
  std::uint64_t seed = 0;
  std::string timestamp;  // wall clock of the run; not part of report files

  std::map<std::string, std::size_t> skipped_by_reason() const;
};

struct ExperimentResult {
  ScoreReport report;
  std::vector<QuestionOutcome> outcomes;  // dataset order
  std::size_t failures = 0;
  bool aborted = false;  // backend failures exceeded 10% of the records
};

// Debates every record (one MCQ each) under config.debate.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<QARecord>& records);
// A single fact-based agent answers each MCQ directly.
ExperimentResult run_baseline(const ExperimentConfig& config, const std::vector<QARecord>& records);

// Scored and unparseable outcomes count toward n_questions; failures and
// skips are listed in `skipped` only.
ScoreReport tabulate(const std::vector<QuestionOutcome>& outcomes, const std::string& label = "",
                     std::uint64_t seed = 0);

// "85.71%", "No data" is produced by the comparison only.
std::string format_percent(std::size_t correct, std::size_t total);
std::string format_accuracy_cell(const CategoryScore& score);

std::string report_csv(const ScoreReport& report);
std::string report_markdown(const ScoreReport& report);

struct ComparisonTable {
  std::vector<std::string> columns;  // display names, e.g. "Baseline", "5/1"
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;

  const std::vector<std::string>& row(const std::string& category) const;  // throws ReportError
  std::string to_csv() const;
  std::string to_markdown() const;
};

// Category x configuration matrix, columns in input order, "Overall" first.
// Categories missing from a report read "No data". Throws ReportError on
// fewer than two reports or duplicate labels.
ComparisonTable compare_reports(const std::vector<ScoreReport>& reports);

// Writes transcripts.jsonl, report.csv, report.md and run_info.json.
void write_experiment_outputs(const std::string& directory, const ExperimentResult& result);
// Rebuilds the report of an experiment directory from transcripts.jsonl.
ScoreReport retabulate_directory(const std::string& directory);

}  // namespace debate_forum
