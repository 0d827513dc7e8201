#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace perish {

// Deterministic numeric formatting for all text outputs.
std::string fmt(double v);
std::string fmt(long long v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void comment(const std::string& line);  // emitted as "# line"
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

}  // namespace perish
