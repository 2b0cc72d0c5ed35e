#include "io/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace vlaser {

namespace {

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void Dataset::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw ValidationError("dataset row width " + std::to_string(row.size()) +
                          " does not match column count " +
                          std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string Dataset::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ',';
    out << columns[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (row[i].present) out << fmt_value(row[i].value);
    }
    out << '\n';
  }
  return out.str();
}

std::string Dataset::to_json() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["columns"] = columns;
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const auto& cell : row) {
      if (cell.present && std::isfinite(cell.value))
        jrow.push_back(cell.value);
      else
        jrow.push_back(nullptr);  // nlohmann would emit null for NaN anyway
    }
    jrows.push_back(std::move(jrow));
  }
  j["rows"] = std::move(jrows);
  return j.dump(1) + "\n";
}

void Dataset::write(const std::string& out_path, const std::string& format) const {
  std::string text;
  if (format == "csv")
    text = to_csv();
  else if (format == "json")
    text = to_json();
  else
    throw ValidationError("unknown output format '" + format + "'");

  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + out_path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing output file '" + out_path + "'");
}

}  // namespace vlaser
