#include "debate_forum/protocol.hpp"

#include <algorithm>
#include <numeric>

namespace debate_forum {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Saboteur:
      return "saboteur";
    case Role::FactBased:
      return "factbased";
    case Role::Moderator:
      return "moderator";
  }
  return "factbased";
}

Role role_from_string(std::string_view name) {
  if (name == "saboteur") return Role::Saboteur;
  if (name == "factbased") return Role::FactBased;
  if (name == "moderator") return Role::Moderator;
  throw ConfigError("unknown role \"" + std::string(name) + "\"");
}

std::string_view to_string(RoundKind kind) {
  switch (kind) {
    case RoundKind::System:
      return "system";
    case RoundKind::Opening:
      return "opening";
    case RoundKind::Rebuttal:
      return "rebuttal";
    case RoundKind::Verdict:
      return "verdict";
    case RoundKind::VerdictRetry:
      return "verdict_retry";
    case RoundKind::Baseline:
      return "baseline";
  }
  return "opening";
}

RoundKind round_kind_from_string(std::string_view name) {
  for (auto kind : {RoundKind::System, RoundKind::Opening, RoundKind::Rebuttal, RoundKind::Verdict,
                    RoundKind::VerdictRetry, RoundKind::Baseline}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw ConfigError("unknown round kind \"" + std::string(name) + "\"");
}

void DebateConfig::validate() const {
  if (n_personas < 2) {
    throw ConfigError("a debate needs at least 2 personas");
  }
  if (n_saboteurs >= n_personas) {
    throw ConfigError("n_saboteurs must be smaller than n_personas (a fact-based moderator is required)");
  }
  if (n_rounds < 1) {
    throw ConfigError("a debate needs at least 1 round");
  }
  if (!(temperature >= 0.0)) {
    throw ConfigError("temperature must be non-negative");
  }
}

std::string DebateConfig::label() const {
  return std::to_string(n_personas) + "/" + std::to_string(n_saboteurs);
}

std::vector<Persona> assign_roles(const DebateConfig& config, Rng& rng) {
  config.validate();
  std::vector<std::size_t> ids(config.n_personas);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(ids));

  std::vector<Persona> personas(config.n_personas);
  for (std::size_t i = 0; i < config.n_personas; ++i) {
    personas[i].id = i;
    personas[i].display_name = "Debater-" + std::to_string(i);
    personas[i].role = Role::FactBased;
  }
  for (std::size_t k = 0; k < config.n_saboteurs; ++k) {
    personas[ids[k]].role = Role::Saboteur;
  }
  const std::size_t remaining = config.n_personas - config.n_saboteurs;
  personas[ids[config.n_saboteurs + rng.uniform_index(remaining)]].role = Role::Moderator;
  return personas;
}

PromptContext prompt_context(const Transcript& transcript, const Persona& persona, std::size_t round) {
  const MCQuestion& q = transcript.question;
  std::string letters;
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    if (i > 0) {
      letters += i + 1 == q.options.size() ? " or " : ", ";
    }
    letters.push_back(option_letter(i));
  }
  PromptContext ctx{
      {"question", q.question},
      {"options", render_options(q.options)},
      {"transcript", render_transcript(transcript.personas, transcript.turns)},
      {"persona_name", persona.display_name},
      {"round_number", std::to_string(round + 1)},
      {"letters", letters},
  };
  if (persona.role == Role::Saboteur) {
    ctx["correct_answer"] = std::string(1, option_letter(q.correct_index)) + ") " + q.options[q.correct_index];
    ctx["target_wrong_option"] = std::string(1, option_letter(q.decoy_index)) + ") " + q.options[q.decoy_index];
  }
  return ctx;
}

ChatRequest build_request(const TemplateSet& templates, Role role, RoundKind kind,
                          const PromptContext& context, const DebateConfig& config) {
  ChatRequest req;
  req.system_prompt = render_prompt(templates.get(role, RoundKind::System), context);
  req.messages.push_back({"user", render_prompt(templates.get(role, kind), context)});
  req.temperature = config.temperature;
  req.max_reply_tokens = config.max_reply_tokens;
  return req;
}

namespace {

ChatResponse ask(Agent& agent, const Transcript& transcript, const Persona& persona, RoundKind kind,
                 std::size_t round, ChatRequest request) {
  AgentTurn turn{.request = std::move(request),
                 .kind = kind,
                 .round = round,
                 .persona = persona,
                 .question = transcript.question,
                 .transcript = transcript.turns};
  try {
    return agent.respond(turn);
  } catch (const BackendError& e) {
    throw DebateError(std::string("agent ") + persona.display_name + " failed: " + e.what(), transcript);
  }
}

void append_turn(Transcript& t, std::size_t round, const Persona& persona, std::string message,
                 std::optional<std::size_t> choice) {
  Turn turn;
  turn.round = round;
  turn.persona_id = persona.id;
  turn.role = persona.role;
  turn.message = std::move(message);
  turn.parsed_choice = choice;
  turn.seq = t.turns.size();
  t.turns.push_back(std::move(turn));
}

// Final-answer exchange shared by the moderator verdict and the baseline.
Verdict final_answer(Transcript& transcript, Agent& agent, const Persona& persona, Role template_role,
                     RoundKind kind, std::size_t round, const DebateConfig& config,
                     const TemplateSet& templates) {
  const std::size_t n_options = transcript.question.options.size();
  PromptContext ctx = prompt_context(transcript, persona, round);
  ChatResponse reply = ask(agent, transcript, persona, kind, round,
                           build_request(templates, template_role, kind, ctx, config));
  auto choice = try_parse_choice(reply.text, n_options);
  std::size_t reprompts = 0;
  if (!choice) {
    reprompts = 1;
    reply = ask(agent, transcript, persona, RoundKind::VerdictRetry, round,
                build_request(templates, template_role, RoundKind::VerdictRetry, ctx, config));
    choice = try_parse_choice(reply.text, n_options);
  }
  append_turn(transcript, round, persona, reply.text, choice);
  if (!choice) {
    throw VerdictError(VerdictError::Kind::Unparseable,
                       "final answer of " + persona.display_name + " names no option after a reprompt",
                       transcript);
  }
  Verdict v;
  v.chosen_index = *choice;
  v.correct = *choice == transcript.question.correct_index;
  v.moderator_persona_id = persona.id;
  v.raw_message = reply.text;
  v.reprompt_count = reprompts;
  transcript.verdict = v;
  return v;
}

}  // namespace

void debate_round(Transcript& transcript, std::size_t round_index, AgentRefs agents,
                  const DebateConfig& config, const TemplateSet& templates) {
  const std::size_t n = transcript.personas.size();
  if (transcript.turns.size() != round_index * n) {
    throw ConfigError("debate_round " + std::to_string(round_index) + " called with " +
                      std::to_string(transcript.turns.size()) + " turns recorded");
  }
  if (agents.size() != n) {
    throw ConfigError("one agent per persona is required");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return transcript.personas[a].id < transcript.personas[b].id;
  });
  const RoundKind kind = round_index == 0 ? RoundKind::Opening : RoundKind::Rebuttal;
  const std::size_t n_options = transcript.question.options.size();
  for (std::size_t slot : order) {
    const Persona& persona = transcript.personas[slot];
    const PromptContext ctx = prompt_context(transcript, persona, round_index);
    ChatResponse reply = ask(*agents[persona.id], transcript, persona, kind, round_index,
                             build_request(templates, persona.role, kind, ctx, config));
    auto choice = try_parse_choice(reply.text, n_options);
    append_turn(transcript, round_index, persona, std::move(reply.text), choice);
  }
}

Verdict moderator_verdict(Transcript& transcript, Agent& moderator, const DebateConfig& config,
                          const TemplateSet& templates) {
  auto it = std::find_if(transcript.personas.begin(), transcript.personas.end(),
                         [](const Persona& p) { return p.role == Role::Moderator; });
  if (it == transcript.personas.end()) {
    throw ConfigError("debate has no moderator");
  }
  if (transcript.turns.size() != config.n_rounds * transcript.personas.size()) {
    throw ConfigError("moderator_verdict called before all debate rounds completed");
  }
  const Persona moderator_persona = *it;
  return final_answer(transcript, moderator, moderator_persona, Role::Moderator, RoundKind::Verdict,
                      config.n_rounds, config, templates);
}

DebateResult run_debate(const MCQuestion& question, const std::vector<Persona>& personas,
                        AgentRefs agents, const DebateConfig& config, const TemplateSet& templates,
                        const std::string& debate_id) {
  config.validate();
  if (personas.size() != config.n_personas || agents.size() != personas.size()) {
    throw ConfigError("persona/agent count does not match n_personas");
  }
  std::size_t saboteurs = 0;
  std::size_t moderators = 0;
  for (std::size_t i = 0; i < personas.size(); ++i) {
    if (personas[i].id != i) {
      throw ConfigError("persona ids must be 0..N-1 in order");
    }
    saboteurs += personas[i].role == Role::Saboteur ? 1 : 0;
    moderators += personas[i].role == Role::Moderator ? 1 : 0;
  }
  if (saboteurs != config.n_saboteurs || moderators != 1) {
    throw ConfigError("personas must hold exactly n_saboteurs saboteurs and one moderator");
  }

  Transcript transcript;
  transcript.debate_id = debate_id;
  transcript.question = question;
  transcript.personas = personas;
  transcript.turns.reserve(config.n_rounds * personas.size() + 1);
  for (std::size_t round = 0; round < config.n_rounds; ++round) {
    debate_round(transcript, round, agents, config, templates);
  }
  Agent& moderator = *agents[std::find_if(personas.begin(), personas.end(), [](const Persona& p) {
                                return p.role == Role::Moderator;
                              })->id];
  Verdict verdict = moderator_verdict(transcript, moderator, config, templates);
  return {std::move(verdict), std::move(transcript)};
}

DebateResult answer_directly(const MCQuestion& question, Agent& agent, const DebateConfig& config,
                             const TemplateSet& templates, const std::string& debate_id) {
  Transcript transcript;
  transcript.debate_id = debate_id;
  transcript.question = question;
  transcript.personas = {Persona{0, "Debater-0", Role::FactBased}};
  const Persona persona = transcript.personas.front();
  Verdict verdict = final_answer(transcript, agent, persona, Role::FactBased, RoundKind::Baseline, 0,
                                 config, templates);
  return {std::move(verdict), std::move(transcript)};
}

}  // namespace debate_forum
