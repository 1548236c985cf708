#include "acgeo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace acgeo {

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw config_error("CSV needs at least one column");
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += header[i];
  }
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw config_error("CSV row width does not match the header");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
}

void CsvWriter::row_numeric(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_g17(v));
  row(cells);
}

void CsvWriter::write_file(const std::string& path) const {
  write_text_file(path, buf_);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
  if (!out) throw config_error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw config_error("write failed for '" + path + "'");
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open JSON file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

std::string curve_to_csv(const DiscreteCurve& c) {
  CsvWriter csv({"t", "chart", "r_or_u", "phi_or_v"});
  int N = c.segments();
  for (int i = 0; i <= N; ++i) {
    const ChartPoint& p = c.nodes[i];
    csv.row({format_g17((double)i / N), p.is_polar() ? "polar" : "patch",
             format_g17(p.x1), format_g17(p.x2)});
  }
  return csv.str();
}

DiscreteCurve curve_from_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != "t,chart,r_or_u,phi_or_v")
    throw config_error("curve CSV: missing or wrong header");
  DiscreteCurve c;
  int lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string t, chart, x1, x2;
    if (!std::getline(ls, t, ',') || !std::getline(ls, chart, ',') ||
        !std::getline(ls, x1, ',') || !std::getline(ls, x2))
      throw config_error("curve CSV line " + std::to_string(lineno) +
                         ": expected 4 columns");
    Chart ch;
    if (chart == "polar") {
      ch = Chart::Polar;
    } else if (chart == "patch") {
      ch = Chart::Patch;
    } else {
      throw config_error("curve CSV line " + std::to_string(lineno) +
                         ": unknown chart '" + chart + "'");
    }
    try {
      c.nodes.push_back({ch, std::stod(x1), std::stod(x2)});
    } catch (const std::exception&) {
      throw config_error("curve CSV line " + std::to_string(lineno) +
                         ": bad number");
    }
  }
  if (!c.valid()) throw config_error("curve CSV: fewer than two nodes");
  return c;
}

Json curve_to_json(const DiscreteCurve& c) {
  Json nodes = Json::array();
  for (const ChartPoint& p : c.nodes) {
    Json n;
    n["chart"] = p.is_polar() ? "polar" : "patch";
    n["x1"] = p.x1;
    n["x2"] = p.x2;
    nodes.push_back(std::move(n));
  }
  Json j;
  j["segments"] = c.segments();
  j["nodes"] = std::move(nodes);
  return j;
}

namespace {

bool type_matches(const Json& doc, const std::string& t) {
  if (t == "object") return doc.is_object();
  if (t == "array") return doc.is_array();
  if (t == "string") return doc.is_string();
  if (t == "boolean") return doc.is_boolean();
  if (t == "integer") return doc.is_number_integer();
  if (t == "number") return doc.is_number();
  if (t == "null") return doc.is_null();
  return false;
}

void check(const Json& doc, const Json& schema, const std::string& path,
           std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(doc, t.get<std::string>());
    } else if (t.is_array()) {
      for (const Json& one : t)
        if (type_matches(doc, one.get<std::string>())) ok = true;
    }
    if (!ok) {
      out.push_back(path + ": expected type " + t.dump());
      return;  // further structural checks would only cascade
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const Json& v : schema["enum"])
      if (v == doc) ok = true;
    if (!ok) out.push_back(path + ": value not in enum " + schema["enum"].dump());
  }
  if (schema.contains("required") && doc.is_object()) {
    for (const Json& key : schema["required"])
      if (!doc.contains(key.get<std::string>()))
        out.push_back(path + ": missing required key '" + key.get<std::string>() +
                      "'");
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end();
         ++it) {
      if (doc.contains(it.key()))
        check(doc[it.key()], it.value(), path + "/" + it.key(), out);
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    for (size_t i = 0; i < doc.size(); ++i)
      check(doc[i], schema["items"], path + "/" + std::to_string(i), out);
  }
}

}  // namespace

std::vector<std::string> schema_violations(const Json& doc, const Json& schema) {
  std::vector<std::string> out;
  check(doc, schema, "", out);
  return out;
}

}  // namespace acgeo
