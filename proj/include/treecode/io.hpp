#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace treecode {

// Fixed-format double rendering so identical runs produce identical bytes.
std::string fmt_g17(double v);

// One logical table per file: '#'-prefixed JSON provenance header, a column
// header row, then comma-separated data rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void set_provenance(std::string json_line) { provenance_ = std::move(json_line); }

  std::vector<std::string>& add_row() {
    rows_.emplace_back();
    return rows_.back();
  }
  void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void write(std::ostream& out) const;
  void save(const std::string& path) const;

 private:
  std::string provenance_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace treecode
