#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "acgeo/curve.hpp"

namespace acgeo {

// Insertion-ordered JSON keeps output key order stable across runs.
using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form ("%.17g", '.' separator, no locale).
std::string format_g17(double x);

// CSV with a header row, '.' decimal separator, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& values);
  const std::string& str() const { return buf_; }
  void write_file(const std::string& path) const;

 private:
  size_t columns_;
  std::string buf_;
};

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

// Curve round-trip: CSV columns t, chart, r_or_u, phi_or_v.
std::string curve_to_csv(const DiscreteCurve& c);
DiscreteCurve curve_from_csv(const std::string& text);
Json curve_to_json(const DiscreteCurve& c);

// Validates a document against the subset of JSON Schema the shipped schema
// files use: type (incl. lists), required, properties, items, enum.  Returns
// human-readable violations, empty when the document conforms.
std::vector<std::string> schema_violations(const Json& doc, const Json& schema);

}  // namespace acgeo
