#include "doctest.h"

#include "cotforge/report.hpp"

using namespace cotforge;

namespace {

Report sample() {
  Report r;
  r.title = "demo";
  r.meta = {{"seed", "7"}};
  r.scalars = {{"precision", 0.5, 10}, {"rerank_accuracy", std::nullopt, 0}};
  r.tables = {{"buckets", {"range", "n", "accuracy"}, {{"[0,20)", 3, 0.66666}, {"[20,40)", 0, nullptr}}}};
  r.curves = {{"vote", {{1, 0.5, 0.01, 10, 4}, {2, 0.75, 0.0, 1, 4}}}};
  return r;
}

}  // namespace

TEST_CASE("text rendering") {
  const auto text = render_text(sample());
  CHECK(text.find("# seed: 7") != std::string::npos);
  CHECK(text.find("0.5000") != std::string::npos);
  CHECK(text.find("n/a") != std::string::npos);
  CHECK(text.find("0.6667") != std::string::npos);
  CHECK(render_text(sample()) == text);
}

TEST_CASE("csv rendering") {
  const auto csv = render_curves_csv(sample());
  CHECK(csv.starts_with("# seed=7\ncurve,k,accuracy,stderr,trials\n"));
  CHECK(csv.find("vote,2,0.75") != std::string::npos);
}

TEST_CASE("json keeps nulls") {
  const auto j = to_json(sample());
  CHECK(j["title"] == "demo");
  bool saw_null = false;
  for (const auto& s : j["scalars"]) saw_null |= s["value"].is_null();
  CHECK(saw_null);
}
