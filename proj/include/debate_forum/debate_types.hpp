#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debate_forum/dataset.hpp"

namespace debate_forum {

// The Moderator is a Fact-Based participant that also issues the verdict.
enum class Role { Saboteur, FactBased, Moderator };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);  // throws ConfigError
inline bool is_fact_based(Role role) { return role != Role::Saboteur; }

// Which prompt a persona is answering.
enum class RoundKind { System, Opening, Rebuttal, Verdict, VerdictRetry, Baseline };

std::string_view to_string(RoundKind kind);
RoundKind round_kind_from_string(std::string_view name);  // throws ConfigError

struct Persona {
  std::size_t id = 0;
  std::string display_name;
  Role role = Role::FactBased;

  bool operator==(const Persona&) const = default;
};

struct DebateConfig {
  std::size_t n_personas = 3;
  std::size_t n_saboteurs = 1;
  std::size_t n_rounds = 2;
  std::uint64_t seed = 0;
  double temperature = 0.7;
  std::size_t max_reply_tokens = 512;

  void validate() const;  // throws ConfigError
  // "N/S", e.g. "5/1".
  std::string label() const;
};

struct Turn {
  std::size_t round = 0;  // the verdict turn uses round == n_rounds
  std::size_t persona_id = 0;
  Role role = Role::FactBased;
  std::string message;
  std::optional<std::size_t> parsed_choice;
  std::uint64_t seq = 0;

  bool operator==(const Turn&) const = default;
};

struct Verdict {
  std::size_t chosen_index = 0;
  bool correct = false;
  std::size_t moderator_persona_id = 0;
  std::string raw_message;
  std::size_t reprompt_count = 0;

  bool operator==(const Verdict&) const = default;
};

struct Transcript {
  std::string debate_id;
  MCQuestion question;
  std::vector<Persona> personas;
  std::vector<Turn> turns;
  std::optional<Verdict> verdict;

  bool operator==(const Transcript&) const = default;
};

}  // namespace debate_forum
