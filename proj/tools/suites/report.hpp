#pragma once

// Check records shared by every subcommand and their JSON-lines / CSV
// serialization. Numbers are printed with 17 significant digits so reports
// are byte-stable for a fixed manifest and seed.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace varflow::cli {

struct Record {
  std::string suite;
  std::string anchor;  // the property or identity under test
  std::string test;
  double value = 0.0;
  double reference = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> extra;
  std::vector<std::pair<std::string, std::string>> notes;
};

/// residual <= tolerance * scale.
Record make_check(std::string suite, std::string anchor, std::string test, double value,
                  double reference, double residual, double tolerance, double scale);

/// |value - reference| against an absolute tolerance.
Record absolute_check(std::string suite, std::string anchor, std::string test, double value,
                      double reference, double tolerance, double scale);
/// |value - reference| / |reference| against a relative tolerance.
Record relative_check(std::string suite, std::string anchor, std::string test, double value,
                      double reference, double tolerance, double scale);

std::string format_number(double v);
void write_jsonl(std::ostream& os, const std::vector<Record>& records);
/// suite,anchor,test,value,reference,residual,tolerance,pass
void write_summary_csv(std::ostream& os, const std::vector<Record>& records);

struct Tally {
  int passed = 0;
  int failed = 0;
};
Tally tally(const std::vector<Record>& records);

}  // namespace varflow::cli
