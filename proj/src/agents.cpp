#include "debate_forum/agents.hpp"

#include <algorithm>
#include <map>

#include "debate_forum/errors.hpp"
#include "debate_forum/prompts.hpp"

namespace debate_forum {

namespace {

std::string option_label(const MCQuestion& q, std::size_t index) {
  return std::string(1, option_letter(index)) + ") " + q.options.at(index);
}

std::size_t draw_initial_stance(const MCQuestion& q, const ScriptedParams& params, Rng& rng) {
  const bool correct = rng.bernoulli(params.p_correct);
  const std::size_t wrong_slot = rng.uniform_index(q.options.size() - 1);
  if (correct) {
    return q.correct_index;
  }
  return wrong_slot < q.correct_index ? wrong_slot : wrong_slot + 1;
}

ChatResponse scripted_reply(std::string body, std::size_t stance) {
  ChatResponse r;
  r.text = std::move(body) + "\n" + format_choice(stance);
  r.backend_label = "scripted";
  return r;
}

}  // namespace

void ScriptedParams::validate() const {
  if (!(p_correct >= 0.0 && p_correct <= 1.0)) {
    throw ConfigError("p_correct must be in [0, 1]");
  }
  if (!(susceptibility >= 0.0 && susceptibility <= 1.0)) {
    throw ConfigError("susceptibility must be in [0, 1]");
  }
}

std::optional<std::size_t> modal_stance(std::span<const std::optional<std::size_t>> stances) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& s : stances) {
    if (s) {
      ++counts[*s];
    }
  }
  std::optional<std::size_t> best;
  std::size_t best_count = 0;
  bool tied = false;
  for (const auto& [option, count] : counts) {
    if (count > best_count) {
      best = option;
      best_count = count;
      tied = false;
    } else if (count == best_count) {
      tied = true;
    }
  }
  return tied ? std::nullopt : best;
}

std::size_t majority_verdict(std::span<const std::optional<std::size_t>> final_stances,
                             std::optional<std::size_t> moderator_stance, std::size_t option_count) {
  std::vector<std::size_t> counts(option_count, 0);
  for (const auto& s : final_stances) {
    if (s && *s < option_count) {
      ++counts[*s];
    }
  }
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  if (top == 0) {
    return moderator_stance && *moderator_stance < option_count ? *moderator_stance : 0;
  }
  if (moderator_stance && *moderator_stance < option_count && counts[*moderator_stance] == top) {
    return *moderator_stance;
  }
  for (std::size_t i = 0; i < option_count; ++i) {
    if (counts[i] == top) {
      return i;
    }
  }
  return 0;  // unreachable
}

ChatResponse respond_scripted(const ScriptedView& view, const ScriptedParams& params, Rng& rng) {
  const MCQuestion& q = view.question;
  if (q.options.size() < 2) {
    throw ConfigError("scripted agent needs at least two options");
  }

  if (view.kind == RoundKind::Verdict || view.kind == RoundKind::VerdictRetry) {
    const std::size_t choice = majority_verdict(view.final_round, view.own_stance, q.options.size());
    return scripted_reply("Having weighed every argument in the debate, the forum's answer is " +
                              option_label(q, choice) + ".",
                          choice);
  }

  if (view.role == Role::Saboteur) {
    std::size_t target = params.saboteur_target.value_or(q.decoy_index);
    if (target >= q.options.size()) {
      target = q.decoy_index;
    }
    const std::string label = option_label(q, target);
    if (view.kind == RoundKind::Opening) {
      return scripted_reply("I am confident the answer is " + label +
                                ". The other options rely on popular assumptions that do not "
                                "survive scrutiny, while this one matches the established record.",
                            target);
    }
    return scripted_reply("The objections raised so far are not convincing. The evidence still "
                          "points to " + label + ".",
                          target);
  }

  if (view.kind == RoundKind::Opening || view.kind == RoundKind::Baseline || !view.own_stance) {
    const std::size_t stance = draw_initial_stance(q, params, rng);
    return scripted_reply("Based on the facts I know, the answer is " + option_label(q, stance) + ".",
                          stance);
  }

  std::size_t stance = *view.own_stance;
  const bool sway = rng.bernoulli(params.susceptibility);
  if (sway) {
    if (auto mode = modal_stance(view.others_previous); mode && *mode < q.options.size()) {
      if (*mode != stance) {
        stance = *mode;
        return scripted_reply("The other arguments have persuaded me; I now think the answer is " +
                                  option_label(q, stance) + ".",
                              stance);
      }
    }
  }
  return scripted_reply("I maintain that the answer is " + option_label(q, stance) + ".", stance);
}

std::uint64_t persona_sub_seed(std::uint64_t experiment_seed, std::string_view debate_id,
                               std::size_t persona_id) {
  return derive_seed(experiment_seed, debate_id, persona_id);
}

ScriptedAgent::ScriptedAgent(ScriptedParams params, std::uint64_t sub_seed)
    : params_(params), sub_seed_(sub_seed) {
  params_.validate();
}

ChatResponse ScriptedAgent::respond(const AgentTurn& turn) {
  ScriptedView view{.role = turn.persona.role,
                    .kind = turn.kind,
                    .round = turn.round,
                    .question = turn.question,
                    .own_stance = std::nullopt,
                    .others_previous = {},
                    .final_round = {}};
  for (const auto& t : turn.transcript) {
    if (t.persona_id == turn.persona.id && t.parsed_choice) {
      view.own_stance = t.parsed_choice;
    }
    if (turn.round > 0 && t.round + 1 == turn.round) {
      if (t.persona_id != turn.persona.id) {
        view.others_previous.push_back(t.parsed_choice);
      }
      view.final_round.push_back(t.parsed_choice);
    }
  }
  Rng rng(derive_seed(sub_seed_, to_string(turn.kind), turn.round));
  return respond_scripted(view, params_, rng);
}

RemoteAgent::RemoteAgent(std::shared_ptr<RemoteClient> client) : client_(std::move(client)) {
  if (!client_) {
    throw ConfigError("remote agent requires a client");
  }
}

ChatResponse RemoteAgent::respond(const AgentTurn& turn) { return client_->respond(turn.request); }

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::Scripted ? "scripted" : "remote";
}

BackendKind backend_from_string(std::string_view name) {
  if (name == "scripted") return BackendKind::Scripted;
  if (name == "remote") return BackendKind::Remote;
  throw ConfigError("unknown backend \"" + std::string(name) + "\" (expected scripted or remote)");
}

std::unique_ptr<Agent> make_agent(const Persona& persona, BackendKind backend, const BackendConfigs& configs,
                                  std::string_view debate_id) {
  if (backend == BackendKind::Scripted) {
    if (!configs.scripted) {
      throw ConfigError("scripted backend selected without scripted parameters");
    }
    return std::make_unique<ScriptedAgent>(
        *configs.scripted, persona_sub_seed(configs.scripted->seed, debate_id, persona.id));
  }
  if (configs.remote_client) {
    return std::make_unique<RemoteAgent>(configs.remote_client);
  }
  if (!configs.remote) {
    throw ConfigError("remote backend selected without remote configuration");
  }
  return std::make_unique<RemoteAgent>(std::make_shared<RemoteClient>(*configs.remote));
}

}  // namespace debate_forum
