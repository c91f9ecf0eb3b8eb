#pragma once

#include <string>
#include <vector>

#include "nvrr/physics.hpp"

namespace nvrr {

// Tabular data with a header row. Quoting follows RFC 4180: fields containing
// commas, quotes or newlines are quoted and embedded quotes doubled.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

std::string csv_escape(const std::string& field);
std::string format_double(double value);  // shortest stable form, %.12g

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace nvrr
