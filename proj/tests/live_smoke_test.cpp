// Live smoke test against a real OpenAI-compatible endpoint: one question,
// one 3/1 forum. Runs only when DEBATE_FORUM_LIVE_TEST=1 and
// DEBATE_FORUM_API_KEY are set; DEBATE_FORUM_BASE_URL and
// DEBATE_FORUM_MODEL override the defaults.

#include <cstdlib>
#include <iostream>

#include "debate_forum/bench.hpp"
#include "debate_forum/dataset.hpp"
#include "test_support.hpp"

using namespace debate_forum;

namespace {
constexpr int kSkip = 77;
}

int main() {
  const char* flag = std::getenv("DEBATE_FORUM_LIVE_TEST");
  if (flag == nullptr || std::string(flag) != "1") {
    std::cout << "live smoke test skipped (set DEBATE_FORUM_LIVE_TEST=1 to run)\n";
    return kSkip;
  }
  try {
    RemoteBackendConfig remote;
    if (const char* url = std::getenv("DEBATE_FORUM_BASE_URL")) remote.base_url = url;
    if (const char* model = std::getenv("DEBATE_FORUM_MODEL")) remote.model_name = model;
    remote = RemoteBackendConfig::from_environment(remote);

    auto data = load_truthfulqa_file(testing::fixture("truthfulqa_sample.csv"));
    data.records.resize(1);

    ExperimentConfig config;
    config.label = "3/1";
    config.debate = DebateConfig{.n_personas = 3, .n_saboteurs = 1, .max_reply_tokens = 300};
    config.backend = BackendKind::Remote;
    config.backends.remote = remote;
    config.templates = std::make_shared<TemplateSet>(testing::default_templates());
    config.max_parallel = 1;
    const ExperimentResult result = run_experiment(config, data.records);
    const QuestionOutcome& o = result.outcomes.at(0);
    std::cout << "outcome: " << to_string(o.kind) << (o.kind == OutcomeKind::Scored ? (o.correct ? ", correct" : ", incorrect") : "")
              << "\n";
    if (o.transcript) {
      std::cout << "turns: " << o.transcript->turns.size() << "\n";
    }
    if (o.kind == OutcomeKind::Failed) {
      std::cout << "failure: " << o.detail << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 1;
  }
}
