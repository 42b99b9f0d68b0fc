#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "debate_forum/agents.hpp"
#include "debate_forum/dataset.hpp"
#include "debate_forum/prompts.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(DEBATE_FORUM_FIXTURES) + "/" + name; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline const debate_forum::TemplateSet& default_templates() {
  static const auto set = debate_forum::TemplateSet::load(debate_forum::TemplateSet::default_path());
  return set;
}

inline debate_forum::QARecord make_record(std::string id, std::string category, std::size_t n_correct,
                                          std::size_t n_incorrect) {
  debate_forum::QARecord r;
  r.id = std::move(id);
  r.question = "Question " + r.id + "?";
  r.category = std::move(category);
  for (std::size_t i = 0; i < n_correct; ++i) r.correct_answers.push_back("true answer " + std::to_string(i));
  for (std::size_t i = 0; i < n_incorrect; ++i) r.incorrect_answers.push_back("false answer " + std::to_string(i));
  r.best_answer = r.correct_answers.front();
  return r;
}

inline std::vector<debate_forum::QARecord> make_records(std::size_t n, std::size_t categories = 4) {
  std::vector<debate_forum::QARecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(make_record(std::to_string(i), "Category " + std::to_string(i % categories), 1, 4));
  }
  return out;
}

// Agent driven by a callback; records every turn it is asked.
class FakeAgent final : public debate_forum::Agent {
 public:
  using Fn = std::function<std::string(const debate_forum::AgentTurn&)>;
  explicit FakeAgent(Fn fn) : fn_(std::move(fn)) {}
  debate_forum::ChatResponse respond(const debate_forum::AgentTurn& turn) override {
    requests.push_back(turn.request);
    kinds.push_back(turn.kind);
    debate_forum::ChatResponse r;
    r.text = fn_(turn);
    r.backend_label = "fake";
    return r;
  }
  std::vector<debate_forum::ChatRequest> requests;
  std::vector<debate_forum::RoundKind> kinds;

 private:
  Fn fn_;
};

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("debate_forum_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
