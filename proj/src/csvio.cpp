#include "csvio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace projlab {

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::string fingerprint_comment, std::vector<std::string> columns)
    : n_columns_(columns.size()) {
  buffer_ = "# " + std::move(fingerprint_comment) + "\n";
  for (size_t i = 0; i < columns.size(); ++i) {
    buffer_ += columns[i];
    buffer_ += (i + 1 == columns.size()) ? '\n' : ',';
  }
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_) throw std::logic_error("csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    buffer_ += cells[i];
    buffer_ += (i + 1 == cells.size()) ? '\n' : ',';
  }
}

void CsvWriter::add_row_values(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << buffer_;
}

}  // namespace projlab
