#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "debate_forum/outcome.hpp"

namespace debate_forum {

// JSONL transcript format, one object per line, discriminated by "type":
//
//   experiment  {label, seed}                           first line
//   debate      {debate_id, question_id, category, question, options,
//                correct_index, decoy_index, sample_seed, personas}
//   turn        {debate_id, question_id, round, seq, persona_id, role,
//                message, parsed_choice}
//   verdict     {debate_id, question_id, status, chosen_index, correct,
//                moderator_persona_id, reprompt_count, raw_message}
//   failure     {debate_id, question_id, category, reason, detail}
//   skip        {question_id, category, reason}
//
// Every debate line is followed by its turns and then exactly one verdict or
// failure line. See docs/transcript_format.md.

struct ExperimentTranscripts {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<QuestionOutcome> outcomes;  // dataset order
};

nlohmann::ordered_json turn_to_json(const Transcript& transcript, const Turn& turn);

void write_transcripts(std::ostream& out, const ExperimentTranscripts& experiment);
std::string transcripts_to_string(const ExperimentTranscripts& experiment);

// Throws TranscriptError naming the 1-based line on corrupt or truncated input.
ExperimentTranscripts read_transcripts(std::istream& in);
ExperimentTranscripts read_transcripts_file(const std::string& path);

}  // namespace debate_forum
