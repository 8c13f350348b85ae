#pragma once

#include <string>
#include <vector>

namespace causalkit {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // ragged rows are rejected at parse
};

/// RFC-4180-ish reader: comma separated, optional double-quote quoting with
/// "" escapes, first row is the header, empty cell means missing. Throws
/// DataError with a 1-based line number on ragged rows.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const CsvTable& table);

/// Shortest round-trip decimal rendering (std::to_chars), so repeated runs
/// emit byte-identical files.
std::string format_double(double value);

}  // namespace causalkit
