#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace debate_forum::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // usage or configuration error
inline constexpr int kExitPartial = 2;  // aborted run or corrupt transcripts

// Effective settings after merging the config file and flags.
struct CliConfig {
  std::string dataset;
  std::string backend = "scripted";
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::size_t max_attempts = 3;
  std::size_t requests_per_minute = 500;
  double temperature = 0.7;
  std::size_t max_tokens = 512;
  double p_correct = 0.62;
  double susceptibility = 0.0;
  std::size_t n_personas = 3;
  std::size_t n_saboteurs = 1;
  std::size_t n_rounds = 2;
  std::size_t max_options = 5;
  std::uint64_t seed = 0;
  bool sweep = false;
  bool with_baseline = false;
  std::size_t parallel = 0;
  std::string out = "runs";
  std::string templates;  // empty = shipped default
  int verbosity = 0;
};

int cmd_run(const CliConfig& config, const std::string& effective_config, std::ostream& err);
int cmd_baseline(const CliConfig& config, const std::string& effective_config, std::ostream& err);
// Rebuilds report.csv / report.md in each directory from transcripts.jsonl,
// and comparison.csv / comparison.md in `out` when given two or more.
int cmd_report(const std::vector<std::string>& directories, const std::string& out, std::ostream& err);

// Full command line: `debate-forum [--config FILE] <run|baseline|report> ...`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace debate_forum::cli
