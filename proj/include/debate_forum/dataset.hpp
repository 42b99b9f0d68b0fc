#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace debate_forum {

// One TruthfulQA row.
struct QARecord {
  std::string id;  // 0-based data-row index in the source file
  std::string question;
  std::string category;
  std::vector<std::string> correct_answers;
  std::vector<std::string> incorrect_answers;
  std::string best_answer;
};

// A sampled multiple-choice item with exactly one correct option.
struct MCQuestion {
  std::string source_id;
  std::string question;
  std::vector<std::string> options;
  std::size_t correct_index = 0;
  // Position of the first-sampled distractor; the saboteur argues for it.
  std::size_t decoy_index = 0;
  std::string category;
  std::uint64_t sample_seed = 0;

  bool operator==(const MCQuestion&) const = default;
};

// Summary of a load: rows read, rows skipped by reason, normalization notes.
struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_loaded = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count
  std::size_t duplicate_answers_dropped = 0;
  std::size_t case_variant_answers = 0;

  std::size_t rows_skipped() const;
  // Line-oriented text summary.
  std::string to_text() const;
};

struct LoadResult {
  std::vector<QARecord> records;
  LoadReport report;
};

// Trim + collapse internal whitespace runs to one space.
std::string normalize_answer(std::string_view text);

// Split a ";"-delimited answer cell, trimming fragments and dropping empty
// and period-only fragments.
std::vector<std::string> split_answers(std::string_view cell);

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF, and
// newlines inside quotes. Throws CsvParseError with the starting line.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record; false at end of input.
  bool next(std::vector<std::string>& fields);
  // Line on which the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Parses TruthfulQA CSV. Throws CsvParseError / SchemaError.
LoadResult load_truthfulqa(std::istream& source);
LoadResult load_truthfulqa_file(const std::string& path);

// Draws one correct answer and up to max_options-1 distinct distractors,
// then shuffles. Throws SampleError(NoDistractors) when the record has no
// incorrect answers.
MCQuestion sample_mcq(const QARecord& record, std::uint64_t seed, std::size_t max_options = 5);

// Category buckets in first-appearance order.
using CategoryBuckets = std::vector<std::pair<std::string, std::vector<QARecord>>>;
CategoryBuckets partition_by_category(const std::vector<QARecord>& records);

}  // namespace debate_forum
