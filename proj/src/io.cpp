#include "treecode/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace treecode {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvTable::write(std::ostream& out) const {
  if (!provenance_.empty()) out << "# " << provenance_ << "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out << columns_[c] << (c + 1 < columns_.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c] << (c + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write(out);
}

}  // namespace treecode
