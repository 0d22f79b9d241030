// CSV emission with a stable dialect: comma separators, '.' decimals,
// one header row, LF line endings, and a leading comment line embedding
// the configuration fingerprint. Files are a pure function of
// (config, seed); doubles are printed with %.17g so round-trips are exact.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace projlab {

uint64_t fnv1a64(const std::string& text);

std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::string fingerprint_comment, std::vector<std::string> columns);

  void add_row(const std::vector<std::string>& cells);
  void add_row_values(const std::vector<double>& values);
  const std::string& str() const { return buffer_; }
  void write_file(const std::string& path) const;

 private:
  std::string buffer_;
  size_t n_columns_;
};

}  // namespace projlab
