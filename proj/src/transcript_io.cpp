#include "debate_forum/transcript_io.hpp"

#include <fstream>
#include <sstream>

#include "debate_forum/errors.hpp"

namespace debate_forum {

using ojson = nlohmann::ordered_json;

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Scored:
      return "scored";
    case OutcomeKind::Unparseable:
      return "unparseable";
    case OutcomeKind::Failed:
      return "failed";
    case OutcomeKind::Skipped:
      return "skipped";
  }
  return "scored";
}

namespace {

ojson debate_header(const Transcript& t) {
  ojson personas = ojson::array();
  for (const auto& p : t.personas) {
    personas.push_back({{"persona_id", p.id}, {"display_name", p.display_name}, {"role", to_string(p.role)}});
  }
  return {{"type", "debate"},
          {"debate_id", t.debate_id},
          {"question_id", t.question.source_id},
          {"category", t.question.category},
          {"question", t.question.question},
          {"options", t.question.options},
          {"correct_index", t.question.correct_index},
          {"decoy_index", t.question.decoy_index},
          {"sample_seed", t.question.sample_seed},
          {"personas", std::move(personas)}};
}

ojson verdict_line(const Transcript& t, const QuestionOutcome& o) {
  ojson line{{"type", "verdict"}, {"debate_id", t.debate_id}, {"question_id", t.question.source_id}};
  if (o.kind == OutcomeKind::Scored && t.verdict) {
    const Verdict& v = *t.verdict;
    line["status"] = "ok";
    line["chosen_index"] = v.chosen_index;
    line["correct"] = v.correct;
    line["moderator_persona_id"] = v.moderator_persona_id;
    line["reprompt_count"] = v.reprompt_count;
    line["raw_message"] = v.raw_message;
  } else {
    std::size_t moderator = 0;
    for (const auto& p : t.personas) {
      if (p.role == Role::Moderator) moderator = p.id;
    }
    if (t.personas.size() == 1) moderator = t.personas.front().id;
    line["status"] = "unparseable";
    line["chosen_index"] = nullptr;
    line["correct"] = false;
    line["moderator_persona_id"] = moderator;
    line["reprompt_count"] = 1;
    line["raw_message"] = t.turns.empty() ? std::string() : t.turns.back().message;
  }
  return line;
}

class LineReader {
 public:
  LineReader(const ojson& doc, std::size_t line) : doc_(doc), line_(line) {}

  const ojson& field(const char* name) const {
    auto it = doc_.find(name);
    if (it == doc_.end()) {
      throw TranscriptError(line_, std::string("missing field \"") + name + "\"");
    }
    return *it;
  }
  std::string str(const char* name) const {
    const auto& v = field(name);
    if (!v.is_string()) throw TranscriptError(line_, std::string("field \"") + name + "\" is not a string");
    return v.get<std::string>();
  }
  std::uint64_t uint(const char* name) const {
    const auto& v = field(name);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw TranscriptError(line_, std::string("field \"") + name + "\" is not a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::optional<std::size_t> opt_uint(const char* name) const {
    if (field(name).is_null()) return std::nullopt;
    return static_cast<std::size_t>(uint(name));
  }
  bool boolean(const char* name) const {
    const auto& v = field(name);
    if (!v.is_boolean()) throw TranscriptError(line_, std::string("field \"") + name + "\" is not a boolean");
    return v.get<bool>();
  }
  [[noreturn]] void fail(const std::string& what) const { throw TranscriptError(line_, what); }

 private:
  const ojson& doc_;
  std::size_t line_;
};

}  // namespace

ojson turn_to_json(const Transcript& transcript, const Turn& turn) {
  return {{"type", "turn"},
          {"debate_id", transcript.debate_id},
          {"question_id", transcript.question.source_id},
          {"round", turn.round},
          {"seq", turn.seq},
          {"persona_id", turn.persona_id},
          {"role", to_string(turn.role)},
          {"message", turn.message},
          {"parsed_choice", turn.parsed_choice ? ojson(*turn.parsed_choice) : ojson(nullptr)}};
}

void write_transcripts(std::ostream& out, const ExperimentTranscripts& experiment) {
  out << ojson{{"type", "experiment"}, {"label", experiment.label}, {"seed", experiment.seed}}.dump() << '\n';
  for (const auto& o : experiment.outcomes) {
    if (o.kind == OutcomeKind::Skipped) {
      out << ojson{{"type", "skip"}, {"question_id", o.source_id}, {"category", o.category}, {"reason", o.reason}}
                 .dump()
          << '\n';
      continue;
    }
    if (o.transcript) {
      const Transcript& t = *o.transcript;
      out << debate_header(t).dump() << '\n';
      for (const auto& turn : t.turns) {
        out << turn_to_json(t, turn).dump() << '\n';
      }
      if (o.kind != OutcomeKind::Failed) {
        out << verdict_line(t, o).dump() << '\n';
        continue;
      }
    } else if (o.kind != OutcomeKind::Failed) {
      throw Error("outcome for question " + o.source_id + " has no transcript");
    }
    out << ojson{{"type", "failure"},
                 {"debate_id", o.transcript ? o.transcript->debate_id : std::string()},
                 {"question_id", o.source_id},
                 {"category", o.category},
                 {"reason", o.reason},
                 {"detail", o.detail}}
               .dump()
        << '\n';
  }
}

std::string transcripts_to_string(const ExperimentTranscripts& experiment) {
  std::ostringstream out;
  write_transcripts(out, experiment);
  return out.str();
}

ExperimentTranscripts read_transcripts(std::istream& in) {
  ExperimentTranscripts result;
  std::string text;
  std::size_t line_no = 0;
  bool have_header = false;
  std::optional<QuestionOutcome> open;  // debate awaiting its verdict/failure
  std::size_t open_line = 0;

  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) {
      throw TranscriptError(line_no, "empty line");
    }
    ojson doc;
    try {
      doc = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw TranscriptError(line_no, std::string("invalid JSON (") + e.what() + ")");
    }
    if (!doc.is_object()) {
      throw TranscriptError(line_no, "line is not a JSON object");
    }
    const LineReader r(doc, line_no);
    const std::string type = r.str("type");

    if (!have_header) {
      if (type != "experiment") r.fail("first line must be the experiment header");
      result.label = r.str("label");
      result.seed = r.uint("seed");
      have_header = true;
      continue;
    }
    try {
      if (type == "debate") {
        if (open) {
          throw TranscriptError(open_line, "debate " + open->transcript->debate_id + " has no verdict line");
        }
        Transcript t;
        t.debate_id = r.str("debate_id");
        t.question.source_id = r.str("question_id");
        t.question.category = r.str("category");
        t.question.question = r.str("question");
        t.question.options = r.field("options").get<std::vector<std::string>>();
        t.question.correct_index = r.uint("correct_index");
        t.question.decoy_index = r.uint("decoy_index");
        t.question.sample_seed = r.uint("sample_seed");
        if (t.question.options.size() < 2 || t.question.correct_index >= t.question.options.size()) {
          r.fail("question options/correct_index inconsistent");
        }
        for (const auto& p : r.field("personas")) {
          const LineReader pr(p, line_no);
          t.personas.push_back(Persona{pr.uint("persona_id"), pr.str("display_name"), role_from_string(pr.str("role"))});
        }
        open = QuestionOutcome{};
        open->source_id = t.question.source_id;
        open->category = t.question.category;
        open->transcript = std::move(t);
        open_line = line_no;
      } else if (type == "turn") {
        if (!open || r.str("debate_id") != open->transcript->debate_id) r.fail("turn outside its debate");
        Transcript& t = *open->transcript;
        Turn turn;
        turn.round = r.uint("round");
        turn.seq = r.uint("seq");
        turn.persona_id = r.uint("persona_id");
        turn.role = role_from_string(r.str("role"));
        turn.message = r.str("message");
        turn.parsed_choice = r.opt_uint("parsed_choice");
        if (!t.turns.empty() && turn.seq <= t.turns.back().seq) r.fail("sequence numbers must increase");
        if (turn.parsed_choice && *turn.parsed_choice >= t.question.options.size()) r.fail("parsed_choice out of range");
        t.turns.push_back(std::move(turn));
      } else if (type == "verdict") {
        if (!open || r.str("debate_id") != open->transcript->debate_id) r.fail("verdict outside its debate");
        Transcript& t = *open->transcript;
        const std::string status = r.str("status");
        if (status == "ok") {
          Verdict v;
          v.chosen_index = r.uint("chosen_index");
          v.correct = r.boolean("correct");
          v.moderator_persona_id = r.uint("moderator_persona_id");
          v.reprompt_count = r.uint("reprompt_count");
          v.raw_message = r.str("raw_message");
          if (v.chosen_index >= t.question.options.size()) r.fail("chosen_index out of range");
          if (v.correct != (v.chosen_index == t.question.correct_index)) r.fail("verdict correctness disagrees with correct_index");
          t.verdict = v;
          open->kind = OutcomeKind::Scored;
          open->correct = v.correct;
        } else if (status == "unparseable") {
          open->kind = OutcomeKind::Unparseable;
          open->correct = false;
        } else {
          r.fail("unknown verdict status \"" + status + "\"");
        }
        result.outcomes.push_back(std::move(*open));
        open.reset();
      } else if (type == "failure") {
        QuestionOutcome o;
        if (open) {
          if (r.str("debate_id") != open->transcript->debate_id) r.fail("failure line does not match the open debate");
          o = std::move(*open);
          open.reset();
        }
        o.source_id = r.str("question_id");
        o.category = r.str("category");
        o.kind = OutcomeKind::Failed;
        o.reason = r.str("reason");
        o.detail = r.str("detail");
        result.outcomes.push_back(std::move(o));
      } else if (type == "skip") {
        if (open) throw TranscriptError(open_line, "debate " + open->transcript->debate_id + " has no verdict line");
        QuestionOutcome o;
        o.source_id = r.str("question_id");
        o.category = r.str("category");
        o.kind = OutcomeKind::Skipped;
        o.reason = r.str("reason");
        result.outcomes.push_back(std::move(o));
      } else {
        r.fail("unknown line type \"" + type + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      throw TranscriptError(line_no, std::string("malformed field (") + e.what() + ")");
    } catch (const ConfigError& e) {
      throw TranscriptError(line_no, e.what());
    }
  }
  if (!have_header) {
    throw TranscriptError(line_no + 1, "missing experiment header");
  }
  if (open) {
    throw TranscriptError(open_line, "debate " + open->transcript->debate_id + " has no verdict line (truncated file?)");
  }
  return result;
}

ExperimentTranscripts read_transcripts_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open transcript file: " + path);
  }
  return read_transcripts(in);
}

}  // namespace debate_forum
