#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debate_forum/debate_types.hpp"

namespace debate_forum {

// Placeholder name -> substituted text.
using PromptContext = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
  Role role = Role::FactBased;
  RoundKind kind = RoundKind::Opening;
  std::string text;

  // Placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;
};

// Single-pass substitution of {name} placeholders; substituted text is not
// re-scanned. Throws RenderError naming the first unresolved placeholder.
std::string render_prompt(const PromptTemplate& tmpl, const PromptContext& context);
std::string render_prompt(std::string_view text, const PromptContext& context);

char option_letter(std::size_t index);
// "A) first\nB) second\n..." with no trailing newline.
std::string render_options(const std::vector<std::string>& options);
// Transcript as seen by any participant: display names only, never roles.
std::string render_transcript(const std::vector<Persona>& personas, const std::vector<Turn>& turns);

// Extracts the chosen option from a free-text reply. Rules, first match wins:
//   1. last "ANSWER: <letter>" (case-insensitive) whose letter is in range;
//   2. last standalone capital letter within range.
// option_count must be in 2..=26. Throws ParseError(NoChoice).
std::size_t parse_choice(std::string_view reply, std::size_t option_count);
std::optional<std::size_t> try_parse_choice(std::string_view reply, std::size_t option_count);

// "ANSWER: <letter>". index must be < 26.
std::string format_choice(std::size_t index);

// Every prompt text, keyed by (role, kind), loaded from a sectioned text
// file:
//
//   # comment
//   [meta]
//   version = 1
//   [saboteur.opening]
//   ...template lines...
//
class TemplateSet {
 public:
  static TemplateSet parse(std::string_view document);
  static TemplateSet load(const std::string& path);
  // Path of the template file shipped with the repository.
  static std::string default_path();

  int version() const { return version_; }
  bool contains(Role role, RoundKind kind) const;
  // Throws ConfigError when absent.
  const PromptTemplate& get(Role role, RoundKind kind) const;
  std::vector<PromptTemplate> all() const;

 private:
  int version_ = 0;
  std::map<std::pair<Role, RoundKind>, PromptTemplate> templates_;
};

}  // namespace debate_forum
