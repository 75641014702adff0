#pragma once

// Named scalars, tables and curves, rendered as JSON, aligned text and CSV.

#include <optional>
#include <string>
#include <vector>

#include "cotforge/jsonl.hpp"
#include "cotforge/metrics.hpp"

namespace cotforge {

struct ReportScalar {
  std::string name;
  std::optional<double> value;  // empty renders as n/a
  std::size_t n = 0;            // sample or question count behind the value
};

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;  // strings, numbers or null (n/a)
};

struct ReportCurve {
  std::string name;
  std::vector<CurvePoint> points;
};

struct Report {
  std::string title;
  std::vector<std::pair<std::string, std::string>> meta;  // e.g. seed
  std::vector<ReportScalar> scalars;
  std::vector<ReportTable> tables;
  std::vector<ReportCurve> curves;
};

json to_json(const Report& r);
std::string render_text(const Report& r);
// One CSV with columns curve,k,accuracy,stderr,trials after "# key=value" meta lines.
std::string render_curves_csv(const Report& r);

}  // namespace cotforge
