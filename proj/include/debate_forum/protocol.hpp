#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "debate_forum/agents.hpp"
#include "debate_forum/debate_types.hpp"
#include "debate_forum/errors.hpp"
#include "debate_forum/prompts.hpp"
#include "debate_forum/rng.hpp"

namespace debate_forum {

// Backend failure mid-debate; carries the turns recorded so far.
class DebateError : public Error {
 public:
  DebateError(const std::string& what, Transcript partial)
      : Error(what), partial_(std::move(partial)) {}
  const Transcript& partial() const { return partial_; }

 private:
  Transcript partial_;
};

// The moderator's reply named no option, even after one reprompt. The
// transcript includes the final moderator turn with no parsed choice.
class VerdictError : public Error {
 public:
  enum class Kind { Unparseable };
  VerdictError(Kind kind, const std::string& what, Transcript transcript)
      : Error(what), kind_(kind), transcript_(std::move(transcript)) {}
  Kind kind() const { return kind_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  Kind kind_;
  Transcript transcript_;
};

struct DebateResult {
  Verdict verdict;
  Transcript transcript;
};

// Roles are drawn uniformly: first the saboteurs, then the moderator among
// the remaining personas. Display names are "Debater-<id>".
std::vector<Persona> assign_roles(const DebateConfig& config, Rng& rng);

// Placeholder values visible to `persona` at this point of the debate.
// Saboteurs additionally get {correct_answer} and {target_wrong_option}.
PromptContext prompt_context(const Transcript& transcript, const Persona& persona, std::size_t round);

ChatRequest build_request(const TemplateSet& templates, Role role, RoundKind kind,
                          const PromptContext& context, const DebateConfig& config);

// One agent per persona, indexed by persona id.
using AgentRefs = std::span<Agent* const>;

// Appends one turn per persona (ascending id) for `round_index`.
void debate_round(Transcript& transcript, std::size_t round_index, AgentRefs agents,
                  const DebateConfig& config, const TemplateSet& templates);

// Asks the moderator for the verdict, reprompting once on an unparseable
// reply. Appends the verdict turn and sets transcript.verdict.
Verdict moderator_verdict(Transcript& transcript, Agent& moderator, const DebateConfig& config,
                          const TemplateSet& templates);

DebateResult run_debate(const MCQuestion& question, const std::vector<Persona>& personas,
                        AgentRefs agents, const DebateConfig& config, const TemplateSet& templates,
                        const std::string& debate_id);

// Single-agent answer with no debate (the baseline). Uses the fact-based
// baseline prompt and the same one-reprompt rule as the moderator.
DebateResult answer_directly(const MCQuestion& question, Agent& agent, const DebateConfig& config,
                             const TemplateSet& templates, const std::string& debate_id);

}  // namespace debate_forum
