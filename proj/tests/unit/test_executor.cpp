#include "doctest.h"

#include "test_support.hpp"

#include "cotforge/executor.hpp"

using namespace cotforge;

namespace {

ExecOptions shim_options() {
  ExecOptions o;
  o.shim.command = {COTFORGE_PYTHON, (testing::fixtures() / "shim" / "fake_shim.py").string()};
  o.pipeline.exec_timeout_ms = 3000;
  return o;
}

CoTRecord py_cot(const std::string& id, const std::string& qid, const std::string& text) {
  return {id, qid, CoTKind::sdp, Dialect::py, text, {}};
}

}  // namespace

TEST_CASE("wolfram programs run in process") {
  const auto q = testing::numeric_question("q", 11.0 / 4);
  ExecOptions opts;
  auto o = execute(testing::wolfram_cot("c", "q", "v1 = 3/4\nanswer = v1 + 2"), q, opts);
  CHECK(o.status == ExecStatus::ok);
  CHECK(o.answer == Answer::Numeric(2.75));
  CHECK(o.valid());

  o = execute(testing::wolfram_cot("c", "q", "s = Solve[x^2 == 9, x]\nanswer = x /. s[[2]]"), q, opts);
  CHECK(o.answer == Answer::Numeric(3));

  o = execute(testing::wolfram_cot("c", "q", "v1 = (3 + "), q, opts);
  CHECK(o.status == ExecStatus::syntax_error);
  CHECK(o.answer.is_null());
  o = execute(testing::wolfram_cot("c", "q", "v1 = 1/0"), q, opts);
  CHECK(o.status == ExecStatus::runtime_error);
  o = execute(testing::wolfram_cot("c", "q", "(* nothing *)"), q, opts);
  CHECK(o.status == ExecStatus::extraction_failed);
  o = execute(testing::wolfram_cot("c", "q", "answer = {1, 2}"), q, opts);
  CHECK(o.status == ExecStatus::extraction_failed);
}

TEST_CASE("wolfram results on choice questions match options") {
  const auto q = testing::choice_question("q", 'B', {{'A', 10}, {'B', 12.5}, {'C', 15}});
  ExecOptions opts;
  auto o = execute(testing::wolfram_cot("c", "q", "answer = 25/2"), q, opts);
  CHECK(o.answer == Answer::Choice('B'));
  o = execute(testing::wolfram_cot("c", "q", "answer = 11"), q, opts);
  CHECK(o.status == ExecStatus::ok);
  CHECK(o.answer.is_null());
  CHECK_FALSE(o.valid());
}

TEST_CASE("nl extraction") {
  CHECK(extract_nl_answer("so 3+4 = 7.\nTherefore, the answer is 7.", AnswerFormat::numeric) == Answer::Numeric(7));
  CHECK(extract_nl_answer("therefore the answer is: $1,200 dollars", AnswerFormat::numeric) == Answer::Numeric(1200));
  CHECK(extract_nl_answer("Therefore, the answer is 3.\nTherefore, the answer is 5.", AnswerFormat::numeric) ==
        Answer::Numeric(5));
  CHECK(extract_nl_answer("Therefore, the answer is (C).", AnswerFormat::choice) == Answer::Choice('C'));
  CHECK(extract_nl_answer("The answer is 4", AnswerFormat::numeric).is_null());

  const auto q = testing::numeric_question("q", 4);
  auto o = execute(testing::nl_cot("c", "q", "2 + 2 = 4"), q, ExecOptions{});
  CHECK(o.status == ExecStatus::extraction_failed);
  o = execute(testing::nl_cot("c", "q", "Therefore, the answer is 4."), q, ExecOptions{});
  CHECK(o.valid());
}

TEST_CASE("mismatched question yields extraction_failed") {
  const auto q = testing::numeric_question("other", 1);
  const auto o = execute(testing::wolfram_cot("c", "q", "answer = 1"), q, ExecOptions{});
  CHECK(o.status == ExecStatus::extraction_failed);
}

TEST_CASE("py programs go through the shim") {
  const auto opts = shim_options();
  const auto q = testing::numeric_question("q", 42);
  auto o = execute(py_cot("c", "q", "# mode: ok 42\n"), q, opts);
  CHECK(o.status == ExecStatus::ok);
  CHECK(o.answer == Answer::Numeric(42));

  o = execute(py_cot("c", "q", "# mode: allow\n"), q, opts);
  CHECK(o.answer == Answer::Numeric(2));  // sympy,math

  o = execute(py_cot("c", "q", "# mode: syntax_error bad\n"), q, opts);
  CHECK(o.status == ExecStatus::syntax_error);
  o = execute(py_cot("c", "q", "# mode: runtime_error boom\n"), q, opts);
  CHECK(o.status == ExecStatus::runtime_error);
  CHECK(o.diagnostics == "boom");
  o = execute(py_cot("c", "q", "# mode: blocked_import os\n"), q, opts);
  CHECK(o.status == ExecStatus::runtime_error);
  CHECK(o.diagnostics.find("blocked_import") != std::string::npos);
  o = execute(py_cot("c", "q", "# mode: ok_no_answer\n"), q, opts);
  CHECK(o.status == ExecStatus::extraction_failed);
  o = execute(py_cot("c", "q", "# mode: ok seven\n"), q, opts);
  CHECK(o.status == ExecStatus::extraction_failed);
  o = execute(py_cot("c", "q", "# mode: garbage\n"), q, opts);
  CHECK(o.status == ExecStatus::runtime_error);
  o = execute(py_cot("c", "q", "# mode: crash\n"), q, opts);
  CHECK(o.status == ExecStatus::runtime_error);
  CHECK(o.diagnostics.find("Segmentation") != std::string::npos);
}

TEST_CASE("py shim timeout") {
  auto opts = shim_options();
  opts.pipeline.exec_timeout_ms = 400;
  const auto o = execute(py_cot("c", "q", "# mode: sleep 20\n"), testing::numeric_question("q", 1), opts);
  CHECK(o.status == ExecStatus::timeout);
  CHECK(o.wall_ms >= 400);
  CHECK(o.answer.is_null());
}

TEST_CASE("missing shim binary is a runtime error, not an exception") {
  ExecOptions opts;
  opts.shim.command = {"/nonexistent/shim"};
  const auto o = execute(py_cot("c", "q", "print(1)"), testing::numeric_question("q", 1), opts);
  CHECK(o.status == ExecStatus::runtime_error);
}

TEST_CASE("batch keeps input order and handles unknown questions") {
  const auto q1 = testing::numeric_question("q1", 1);
  const auto q2 = testing::numeric_question("q2", 2);
  std::map<std::string, const MathQuestion*> qs{{"q1", &q1}, {"q2", &q2}};
  std::vector<CoTRecord> recs;
  for (int i = 0; i < 30; ++i) {
    recs.push_back(testing::wolfram_cot("c" + std::to_string(i), i % 3 == 2 ? "qx" : (i % 2 ? "q2" : "q1"),
                                        "answer = " + std::to_string(i)));
  }
  ExecOptions opts;
  opts.pipeline.parallelism = 4;
  const auto out = execute_batch(recs, qs, opts);
  REQUIRE(out.size() == recs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].cot_id == recs[i].id);
    if (i % 3 == 2) {
      CHECK(out[i].status == ExecStatus::extraction_failed);
    } else {
      CHECK(out[i].answer == Answer::Numeric(static_cast<double>(i)));
    }
  }
}

TEST_CASE("outcomes JSONL round-trip") {
  testing::TempDir dir;
  std::vector<ExecutionOutcome> v{{"a", ExecStatus::ok, Answer::Numeric(1.5), 12, ""},
                                  {"b", ExecStatus::timeout, Answer::Null(), 10000, "killed"},
                                  {"c", ExecStatus::ok, Answer::Choice('D'), 0, ""}};
  write_outcomes(dir / "o.jsonl", v);
  const auto back = read_outcomes(dir / "o.jsonl");
  REQUIRE(back.size() == 3);
  CHECK(back[0].answer == v[0].answer);
  CHECK(back[1].status == ExecStatus::timeout);
  CHECK(back[1].wall_ms == 10000);
  CHECK(back[2].answer == Answer::Choice('D'));
}
