#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace varflow::cli {

Record make_check(std::string suite, std::string anchor, std::string test, double value,
                  double reference, double residual, double tolerance, double scale) {
  Record r;
  r.suite = std::move(suite);
  r.anchor = std::move(anchor);
  r.test = std::move(test);
  r.value = value;
  r.reference = reference;
  r.residual = residual;
  r.tolerance = tolerance * scale;
  r.pass = std::isfinite(residual) && residual <= r.tolerance;
  return r;
}

Record absolute_check(std::string suite, std::string anchor, std::string test, double value,
                      double reference, double tolerance, double scale) {
  return make_check(std::move(suite), std::move(anchor), std::move(test), value, reference,
                    std::abs(value - reference), tolerance, scale);
}

Record relative_check(std::string suite, std::string anchor, std::string test, double value,
                      double reference, double tolerance, double scale) {
  const double denom = reference != 0.0 ? std::abs(reference) : 1.0;
  return make_check(std::move(suite), std::move(anchor), std::move(test), value, reference,
                    std::abs(value - reference) / denom, tolerance, scale);
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_jsonl(std::ostream& os, const std::vector<Record>& records) {
  for (const Record& r : records) {
    os << "{\"suite\":" << quoted(r.suite) << ",\"anchor\":" << quoted(r.anchor)
       << ",\"test\":" << quoted(r.test) << ",\"value\":" << format_number(r.value)
       << ",\"reference\":" << format_number(r.reference)
       << ",\"residual\":" << format_number(r.residual)
       << ",\"tolerance\":" << format_number(r.tolerance)
       << ",\"pass\":" << (r.pass ? "true" : "false");
    for (const auto& [k, v] : r.extra) os << ',' << quoted(k) << ':' << format_number(v);
    for (const auto& [k, v] : r.notes) os << ',' << quoted(k) << ':' << quoted(v);
    os << "}\n";
  }
}

void write_summary_csv(std::ostream& os, const std::vector<Record>& records) {
  os << "suite,anchor,test,value,reference,residual,tolerance,pass\n";
  for (const Record& r : records) {
    os << csv_field(r.suite) << ',' << csv_field(r.anchor) << ',' << csv_field(r.test) << ','
       << format_number(r.value) << ',' << format_number(r.reference) << ','
       << format_number(r.residual) << ',' << format_number(r.tolerance) << ','
       << (r.pass ? "pass" : "fail") << '\n';
  }
}

Tally tally(const std::vector<Record>& records) {
  Tally t;
  for (const Record& r : records) (r.pass ? t.passed : t.failed)++;
  return t;
}

}  // namespace varflow::cli
