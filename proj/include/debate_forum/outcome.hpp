#pragma once

#include <optional>
#include <string>

#include "debate_forum/debate_types.hpp"

namespace debate_forum {

enum class OutcomeKind {
  Scored,       // verdict parsed; `correct` is meaningful
  Unparseable,  // moderator named no option; scored as incorrect
  Failed,       // backend failure; excluded from the denominator
  Skipped,      // never debated (no distractors, or experiment aborted)
};

std::string_view to_string(OutcomeKind kind);

// What happened to one dataset record in one experiment.
struct QuestionOutcome {
  std::string source_id;
  std::string category;
  OutcomeKind kind = OutcomeKind::Scored;
  bool correct = false;
  std::string reason;  // Failed / Skipped
  std::string detail;  // free-text diagnostic for Failed
  std::optional<Transcript> transcript;

  bool operator==(const QuestionOutcome&) const = default;
};

}  // namespace debate_forum
