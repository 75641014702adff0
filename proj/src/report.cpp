#include "cotforge/report.hpp"

#include <algorithm>

#include "cotforge/text.hpp"

namespace cotforge {

json to_json(const Report& r) {
  json j;
  j["title"] = r.title;
  json meta = json::object();
  for (const auto& [k, v] : r.meta) meta[k] = v;
  j["meta"] = meta;
  json scalars = json::array();
  for (const auto& s : r.scalars) {
    scalars.push_back(json{{"name", s.name}, {"value", s.value ? json(*s.value) : json(nullptr)}, {"n", s.n}});
  }
  j["scalars"] = scalars;
  json tables = json::array();
  for (const auto& t : r.tables) tables.push_back(json{{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
  j["tables"] = tables;
  json curves = json::array();
  for (const auto& c : r.curves) {
    json pts = json::array();
    for (const auto& p : c.points) {
      pts.push_back(json{{"k", p.k}, {"accuracy", p.accuracy}, {"stderr", p.stderr_}, {"trials", p.trials},
                         {"questions", p.questions}});
    }
    curves.push_back(json{{"name", c.name}, {"points", pts}});
  }
  j["curves"] = curves;
  return j;
}

namespace {

std::string cell_text(const json& c) {
  if (c.is_null()) return "n/a";
  if (c.is_string()) return c.get<std::string>();
  if (c.is_number_integer() || c.is_number_unsigned()) return c.dump();
  if (c.is_number()) return format_fixed(c.get<double>(), 4);
  return c.dump();
}

void append_table(std::string& out, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string c = i < cells.size() ? cells[i] : "";
      if (i) l += "  ";
      // first column left-aligned, the rest right-aligned
      if (i == 0) {
        l += c + std::string(width[i] - c.size(), ' ');
      } else {
        l += std::string(width[i] - c.size(), ' ') + c;
      }
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& row : rows) line(row);
}

}  // namespace

std::string render_text(const Report& r) {
  std::string out = r.title + "\n";
  for (const auto& [k, v] : r.meta) out += "# " + k + ": " + v + "\n";
  if (!r.scalars.empty()) {
    out += "\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : r.scalars) {
      rows.push_back({s.name, s.value ? format_fixed(*s.value, 4) : "n/a", std::to_string(s.n)});
    }
    append_table(out, {"metric", "value", "n"}, rows);
  }
  for (const auto& t : r.tables) {
    out += "\n[" + t.name + "]\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : t.rows) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(cell_text(c));
      rows.push_back(std::move(cells));
    }
    append_table(out, t.columns, rows);
  }
  for (const auto& c : r.curves) {
    out += "\n[curve " + c.name + "]\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : c.points) {
      rows.push_back({std::to_string(p.k), format_fixed(p.accuracy, 4), format_fixed(p.stderr_, 4),
                      std::to_string(p.trials)});
    }
    append_table(out, {"k", "accuracy", "stderr", "trials"}, rows);
  }
  return out;
}

std::string render_curves_csv(const Report& r) {
  std::string out;
  for (const auto& [k, v] : r.meta) out += "# " + k + "=" + v + "\n";
  out += "curve,k,accuracy,stderr,trials\n";
  for (const auto& c : r.curves) {
    for (const auto& p : c.points) {
      out += c.name + "," + std::to_string(p.k) + "," + format_double(p.accuracy) + "," + format_double(p.stderr_) +
             "," + std::to_string(p.trials) + "\n";
    }
  }
  return out;
}

}  // namespace cotforge
