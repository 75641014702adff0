#include "cotforge/jsonl.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "cotforge/text.hpp"

namespace cotforge {

JsonlError::JsonlError(std::string path, std::size_t line, const std::string& message)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
      path_(std::move(path)),
      line_(line) {}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const json&, std::size_t line)>& fn) {
  std::ifstream in(path);
  if (!in) throw JsonlError(path.string(), 0, "cannot open file");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw JsonlError(path.string(), lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw JsonlError(path.string(), lineno, "expected a JSON object");
    try {
      fn(j, lineno);
    } catch (const JsonlError&) {
      throw;
    } catch (const std::exception& e) {
      throw JsonlError(path.string(), lineno, e.what());
    }
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) out << r.dump() << '\n';
}

namespace {

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw InvalidInput(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  throw InvalidInput("expected a string or number");
}

std::string join_violations(const std::vector<Violation>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += "; ";
    s += v.field + ": " + v.rule;
  }
  return s;
}

}  // namespace

json to_json(const Answer& a) {
  json j{{"variant", std::string(to_string(a.variant()))}};
  if (a.is_numeric()) j["value"] = a.value();
  if (a.is_choice()) j["value"] = std::string(1, a.letter());
  return j;
}

Answer answer_from_json(const json& j, char max_letter) {
  const auto variant = require_string(j, "variant");
  if (variant == "null") return Answer::Null();
  const auto& v = require(j, "value");
  if (variant == "numeric") {
    if (!v.is_number()) throw InvalidInput("numeric answer value must be a number");
    return Answer::Numeric(v.get<double>());
  }
  if (variant == "choice") {
    auto a = parse_answer(scalar_text(v), AnswerFormat::choice, max_letter);
    if (!a.is_choice()) throw InvalidInput("choice answer value must be a letter");
    return a;
  }
  throw InvalidInput("unknown answer variant '" + variant + "'");
}

json to_json(const MathQuestion& q) {
  json j;
  j["id"] = q.id;
  j["question"] = q.text;
  if (q.gold.is_numeric()) {
    j["gold"] = q.gold.value();
  } else {
    j["gold"] = render_answer(q.gold);
  }
  j["answer_format"] = std::string(to_string(q.answer_format));
  if (!q.options.empty()) {
    json opts = json::object();
    for (const auto& o : q.options) {
      if (o.numeric && format_double(*o.numeric) == o.text) {
        opts[std::string(1, o.letter)] = *o.numeric;
      } else {
        opts[std::string(1, o.letter)] = o.text;
      }
    }
    j["options"] = opts;
  }
  j["dataset"] = q.dataset;
  return j;
}

MathQuestion question_from_json(const json& j, char max_letter) {
  MathQuestion q;
  q.id = require_string(j, "id");
  q.text = require_string(j, "question");
  q.dataset = require_string(j, "dataset");
  auto format = parse_answer_format(require_string(j, "answer_format"));
  if (!format) throw InvalidInput("answer_format must be 'numeric' or 'choice'");
  q.answer_format = *format;
  q.gold = parse_answer(scalar_text(require(j, "gold")), q.answer_format, max_letter);
  if (auto it = j.find("options"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw InvalidInput("options must be an object");
    for (auto& [key, value] : it->items()) {
      auto letter = parse_answer(key, AnswerFormat::choice, max_letter);
      if (!letter.is_choice() || key.size() != 1) {
        throw InvalidInput("option key '" + key + "' is not a letter in range");
      }
      AnswerOption opt;
      opt.letter = letter.letter();
      opt.text = scalar_text(value);
      auto num = parse_answer(opt.text, AnswerFormat::numeric);
      if (num.is_numeric()) opt.numeric = num.value();
      q.options.push_back(std::move(opt));
    }
    std::sort(q.options.begin(), q.options.end(),
              [](const AnswerOption& a, const AnswerOption& b) { return a.letter < b.letter; });
  }
  if (auto vs = validate_question(q); !vs.empty()) throw InvalidInput(join_violations(vs));
  return q;
}

json to_json(const CoTRecord& r) {
  return json{{"id", r.id},
              {"question_id", r.question_id},
              {"kind", std::string(to_string(r.kind))},
              {"dialect", std::string(to_string(r.dialect))},
              {"text", r.text},
              {"origin", to_string(r.origin)}};
}

CoTRecord cot_from_json(const json& j) {
  CoTRecord r;
  r.id = require_string(j, "id");
  r.question_id = require_string(j, "question_id");
  auto kind = parse_kind(require_string(j, "kind"));
  if (!kind) throw InvalidInput("kind must be one of nl, sdp, cdp, ndp");
  r.kind = *kind;
  auto dialect = parse_dialect(require_string(j, "dialect"));
  if (!dialect) throw InvalidInput("dialect must be one of none, py, wolfram");
  r.dialect = *dialect;
  r.text = require_string(j, "text");
  auto origin = parse_origin(require_string(j, "origin"));
  if (!origin) throw InvalidInput("origin must be seed_manual, llm_round(n), manual_fixup or sampled");
  r.origin = *origin;
  return r;
}

std::vector<MathQuestion> read_questions(const std::filesystem::path& path, const QuestionFilter& keep,
                                         char max_letter) {
  std::vector<MathQuestion> out;
  std::set<std::string> ids;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    auto q = question_from_json(j, max_letter);
    if (!ids.insert(q.id).second) throw InvalidInput("duplicate question id '" + q.id + "'");
    if (!keep || keep(q)) out.push_back(std::move(q));
  });
  return out;
}

void write_questions(const std::filesystem::path& path, const std::vector<MathQuestion>& qs) {
  std::vector<json> rows;
  rows.reserve(qs.size());
  for (const auto& q : qs) rows.push_back(to_json(q));
  write_jsonl(path, rows);
}

std::vector<CoTRecord> read_cots(const std::filesystem::path& path, bool allow_empty_text) {
  std::vector<CoTRecord> out;
  std::set<std::string> ids;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    auto r = cot_from_json(j);
    auto vs = validate_record(r);
    if (allow_empty_text) {
      std::erase_if(vs, [](const Violation& v) { return v.field == "text"; });
    }
    if (!vs.empty()) throw InvalidInput(join_violations(vs));
    if (!ids.insert(r.id).second) throw InvalidInput("duplicate cot id '" + r.id + "'");
    out.push_back(std::move(r));
  });
  return out;
}

void write_cots(const std::filesystem::path& path, const std::vector<CoTRecord>& cots) {
  std::vector<json> rows;
  rows.reserve(cots.size());
  for (const auto& r : cots) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

std::map<std::string, const MathQuestion*> index_questions(const std::vector<MathQuestion>& qs) {
  std::map<std::string, const MathQuestion*> idx;
  for (const auto& q : qs) idx.emplace(q.id, &q);
  return idx;
}

}  // namespace cotforge
