#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace kepshear {

/// Round-trip decimal form ("%.17g"); stable across runs for byte-identical output.
std::string fmt(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// Comma-separated rows; blank lines and '#' comments skipped. The first row
/// is returned like any other (callers decide whether it is a header).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

/// std::stod with a FormatError naming the file position on failure.
double parse_double(const std::string& field, const std::string& where);

}  // namespace kepshear
