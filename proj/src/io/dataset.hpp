#pragma once

#include <string>
#include <vector>

namespace vlaser {

// One table cell: a double, or empty (rendered as "" in CSV and null in JSON).
// Failed sweep points carry NaN, which keeps the cell present but marks the
// value as unusable.
struct Cell {
  bool present = false;
  double value = 0.0;
  Cell() = default;
  Cell(double v) : present(true), value(v) {}
};

// Rectangular result table produced by every run mode.  Column names are part
// of each mode's output contract; see runner.cpp for the schemas.
struct Dataset {
  std::string mode;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);

  std::string to_csv() const;   // header + rows, floats at 12 significant digits
  std::string to_json() const;  // {"mode", "columns", "rows"}, empty cells -> null

  // Serialize in the given format ("csv" or "json") to the path, or to stdout
  // when the path is empty.
  void write(const std::string& out_path, const std::string& format) const;
};

}  // namespace vlaser
