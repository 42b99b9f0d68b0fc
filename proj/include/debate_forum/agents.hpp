#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "debate_forum/chat.hpp"
#include "debate_forum/debate_types.hpp"
#include "debate_forum/remote.hpp"
#include "debate_forum/rng.hpp"

namespace debate_forum {

// Everything a backend may look at for one reply. Remote agents only use
// `request`; scripted agents read the structured fields.
struct AgentTurn {
  ChatRequest request;
  RoundKind kind = RoundKind::Opening;
  std::size_t round = 0;
  const Persona& persona;
  const MCQuestion& question;
  const std::vector<Turn>& transcript;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual ChatResponse respond(const AgentTurn& turn) = 0;
};

struct ScriptedParams {
  double p_correct = 0.62;
  double susceptibility = 0.0;
  // Defaults to the question's first-sampled distractor.
  std::optional<std::size_t> saboteur_target;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Structured input of the scripted policy.
struct ScriptedView {
  Role role = Role::FactBased;
  RoundKind kind = RoundKind::Opening;
  std::size_t round = 0;
  const MCQuestion& question;
  std::optional<std::size_t> own_stance;
  // Other personas' stances in the previous round (rebuttals).
  std::vector<std::optional<std::size_t>> others_previous;
  // Every persona's final-round stance (verdict).
  std::vector<std::optional<std::size_t>> final_round;
};

// Total scripted policy; the reply always ends with format_choice(stance).
ChatResponse respond_scripted(const ScriptedView& view, const ScriptedParams& params, Rng& rng);

// The unique most frequent stance, or nullopt on a tie or no stances.
std::optional<std::size_t> modal_stance(std::span<const std::optional<std::size_t>> stances);

// Plurality over parsed final-round stances. Ties go to the moderator's own
// stance when it is among the tied options, otherwise the lowest tied index.
std::size_t majority_verdict(std::span<const std::optional<std::size_t>> final_stances,
                             std::optional<std::size_t> moderator_stance, std::size_t option_count);

// Sub-seed for one persona in one debate: stable hash of all three inputs.
std::uint64_t persona_sub_seed(std::uint64_t experiment_seed, std::string_view debate_id,
                               std::size_t persona_id);

class ScriptedAgent final : public Agent {
 public:
  ScriptedAgent(ScriptedParams params, std::uint64_t sub_seed);
  ChatResponse respond(const AgentTurn& turn) override;
  std::uint64_t sub_seed() const { return sub_seed_; }

 private:
  ScriptedParams params_;
  std::uint64_t sub_seed_;
};

class RemoteAgent final : public Agent {
 public:
  explicit RemoteAgent(std::shared_ptr<RemoteClient> client);
  ChatResponse respond(const AgentTurn& turn) override;

 private:
  std::shared_ptr<RemoteClient> client_;
};

enum class BackendKind { Scripted, Remote };
std::string_view to_string(BackendKind kind);
BackendKind backend_from_string(std::string_view name);  // throws ConfigError

struct BackendConfigs {
  std::optional<ScriptedParams> scripted;
  std::optional<RemoteBackendConfig> remote;
  // Shared across agents so the rate cap is global. When null, make_agent
  // builds a private client from `remote`.
  std::shared_ptr<RemoteClient> remote_client;
};

// Throws ConfigError when the selected backend has no configuration or the
// remote API key is missing.
std::unique_ptr<Agent> make_agent(const Persona& persona, BackendKind backend, const BackendConfigs& configs,
                                  std::string_view debate_id);

}  // namespace debate_forum
