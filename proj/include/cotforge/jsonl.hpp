#pragma once

// JSONL persistence for the corpus files. One object per line, UTF-8.
//
//   questions: {id, question, gold, answer_format, options?, dataset}
//   cots:      {id, question_id, kind, dialect, text, origin}

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cotforge/corpus.hpp"

namespace cotforge {

using json = nlohmann::json;

// A schema or syntax problem at a specific (1-based) line of a JSONL file.
class JsonlError : public std::runtime_error {
 public:
  JsonlError(std::string path, std::size_t line, const std::string& message);
  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

// Calls `fn` for every non-blank line. Exceptions thrown by `fn` (other than
// JsonlError) are rethrown as JsonlError carrying the line number.
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t line)>& fn);

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

json to_json(const Answer& a);
Answer answer_from_json(const json& j, char max_letter = 'E');

json to_json(const MathQuestion& q);
MathQuestion question_from_json(const json& j, char max_letter = 'E');

json to_json(const CoTRecord& r);
CoTRecord cot_from_json(const json& j);

using QuestionFilter = std::function<bool(const MathQuestion&)>;

// Reads and validates a questions file. Ids must be unique. Questions for
// which `keep` returns false are dropped (dataset-specific cleaning hook).
std::vector<MathQuestion> read_questions(const std::filesystem::path& path,
                                         const QuestionFilter& keep = {},
                                         char max_letter = 'E');
void write_questions(const std::filesystem::path& path, const std::vector<MathQuestion>& qs);

// Reads a cots file; every record must pass validate_record unless
// `allow_empty_text` (residual queues carry empty text).
std::vector<CoTRecord> read_cots(const std::filesystem::path& path, bool allow_empty_text = false);
void write_cots(const std::filesystem::path& path, const std::vector<CoTRecord>& cots);

std::map<std::string, const MathQuestion*> index_questions(const std::vector<MathQuestion>& qs);

}  // namespace cotforge
