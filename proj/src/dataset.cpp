#include "debate_forum/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "debate_forum/errors.hpp"
#include "debate_forum/rng.hpp"

namespace debate_forum {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Removes exact duplicates (after normalization), keeping first occurrence.
std::size_t dedupe(std::vector<std::string>& answers) {
  std::set<std::string> seen;
  std::vector<std::string> kept;
  kept.reserve(answers.size());
  for (auto& a : answers) {
    if (seen.insert(a).second) {
      kept.push_back(std::move(a));
    }
  }
  const std::size_t dropped = answers.size() - kept.size();
  answers = std::move(kept);
  return dropped;
}

std::size_t count_case_variants(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::map<std::string, std::set<std::string>> by_lower;
  for (const auto& s : all) {
    by_lower[to_lower(s)].insert(s);
  }
  std::size_t n = 0;
  for (const auto& [_, spellings] : by_lower) {
    if (spellings.size() > 1) {
      n += spellings.size();
    }
  }
  return n;
}

}  // namespace

std::size_t LoadReport::rows_skipped() const {
  std::size_t n = 0;
  for (const auto& [_, count] : skipped) {
    n += count;
  }
  return n;
}

std::string LoadReport::to_text() const {
  std::ostringstream out;
  out << "rows_read " << rows_read << '\n';
  out << "rows_loaded " << rows_loaded << '\n';
  out << "rows_skipped " << rows_skipped() << '\n';
  for (const auto& [reason, count] : skipped) {
    out << "skipped." << reason << ' ' << count << '\n';
  }
  out << "duplicate_answers_dropped " << duplicate_answers_dropped << '\n';
  out << "case_variant_answers " << case_variant_answers << '\n';
  return out.str();
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_answers(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    std::size_t end = cell.find(';', start);
    if (end == std::string_view::npos) {
      end = cell.size();
    }
    std::string fragment = normalize_answer(cell.substr(start, end - start));
    if (!fragment.empty() && fragment != ".") {
      out.push_back(std::move(fragment));
    }
    start = end + 1;
  }
  return out;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (in_.peek() == std::char_traits<char>::eof()) {
    return false;
  }
  record_line_ = line_;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  char c = 0;
  while (in_.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') {
          ++line_;
        }
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        throw CsvParseError(line_, "unexpected quote inside unquoted field");
      }
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\r' && in_.peek() == '\n') {
      continue;
    } else if (c == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else {
      if (field_was_quoted) {
        throw CsvParseError(line_, "characters after closing quote");
      }
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw CsvParseError(record_line_, "unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return true;
}

LoadResult load_truthfulqa(std::istream& source) {
  CsvReader reader(source);
  std::vector<std::string> header;
  if (!reader.next(header)) {
    throw SchemaError("TruthfulQA CSV is empty (no header row)");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    header[0].erase(0, 3);
  }
  auto column = [&](std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (normalize_answer(header[i]) == name) {
        return i;
      }
    }
    throw SchemaError("missing required column \"" + std::string(name) + "\"");
  };
  const std::size_t col_category = column("Category");
  const std::size_t col_question = column("Question");
  const std::size_t col_best = column("Best Answer");
  const std::size_t col_correct = column("Correct Answers");
  const std::size_t col_incorrect = column("Incorrect Answers");

  LoadResult result;
  LoadReport& report = result.report;
  std::vector<std::string> row;
  std::size_t data_index = 0;
  while (reader.next(row)) {
    if (row.size() == 1 && normalize_answer(row[0]).empty()) {
      continue;  // blank line
    }
    if (row.size() != header.size()) {
      throw CsvParseError(reader.record_line(),
                          "expected " + std::to_string(header.size()) + " fields, found " +
                              std::to_string(row.size()));
    }
    const std::size_t index = data_index++;
    ++report.rows_read;

    QARecord rec;
    rec.id = std::to_string(index);
    rec.question = normalize_answer(row[col_question]);
    rec.category = normalize_answer(row[col_category]);
    rec.correct_answers = split_answers(row[col_correct]);
    rec.incorrect_answers = split_answers(row[col_incorrect]);
    rec.best_answer = normalize_answer(row[col_best]);

    if (rec.correct_answers.empty()) {
      ++report.skipped["empty_correct_answers"];
      continue;
    }
    if (rec.category.empty()) {
      ++report.skipped["empty_category"];
      continue;
    }
    if (rec.question.empty()) {
      ++report.skipped["empty_question"];
      continue;
    }
    report.duplicate_answers_dropped += dedupe(rec.correct_answers);
    report.duplicate_answers_dropped += dedupe(rec.incorrect_answers);
    const std::set<std::string> correct(rec.correct_answers.begin(), rec.correct_answers.end());
    const bool overlaps = std::any_of(rec.incorrect_answers.begin(), rec.incorrect_answers.end(),
                                      [&](const std::string& a) { return correct.count(a) > 0; });
    if (overlaps) {
      ++report.skipped["overlapping_answers"];
      continue;
    }
    report.case_variant_answers += count_case_variants(rec.correct_answers, rec.incorrect_answers);
    if (rec.best_answer.empty()) {
      rec.best_answer = rec.correct_answers.front();
    }
    result.records.push_back(std::move(rec));
    ++report.rows_loaded;
  }
  return result;
}

LoadResult load_truthfulqa_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open dataset file: " + path);
  }
  return load_truthfulqa(in);
}

MCQuestion sample_mcq(const QARecord& record, std::uint64_t seed, std::size_t max_options) {
  if (max_options < 2) {
    throw ConfigError("max_options must be at least 2");
  }
  if (record.correct_answers.empty()) {
    throw ConfigError("record " + record.id + " has no correct answers");
  }
  if (record.incorrect_answers.empty()) {
    throw SampleError(SampleError::Kind::NoDistractors,
                      "record " + record.id + " has no incorrect answers");
  }
  Rng rng(seed);
  const std::string& correct = record.correct_answers[rng.uniform_index(record.correct_answers.size())];

  const std::size_t pool = record.incorrect_answers.size();
  const std::size_t n_wrong = std::min(max_options - 1, pool);
  std::vector<std::size_t> idx(pool);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n_wrong; ++i) {
    std::swap(idx[i], idx[i + rng.uniform_index(pool - i)]);
  }

  // slot 0 is the correct answer, slot 1 the first-sampled distractor.
  std::vector<std::size_t> order(n_wrong + 1);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  MCQuestion q;
  q.source_id = record.id;
  q.question = record.question;
  q.category = record.category;
  q.sample_seed = seed;
  q.options.reserve(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t slot = order[pos];
    if (slot == 0) {
      q.correct_index = pos;
      q.options.push_back(correct);
    } else {
      if (slot == 1) {
        q.decoy_index = pos;
      }
      q.options.push_back(record.incorrect_answers[idx[slot - 1]]);
    }
  }
  return q;
}

CategoryBuckets partition_by_category(const std::vector<QARecord>& records) {
  CategoryBuckets buckets;
  std::map<std::string, std::size_t> position;
  for (const auto& rec : records) {
    const std::string key = normalize_answer(rec.category);
    auto [it, inserted] = position.try_emplace(key, buckets.size());
    if (inserted) {
      buckets.emplace_back(key, std::vector<QARecord>{});
    }
    buckets[it->second].second.push_back(rec);
  }
  return buckets;
}

}  // namespace debate_forum
