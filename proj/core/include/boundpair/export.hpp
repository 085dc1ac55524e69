#pragma once

// Tabular output of scans and spectra as CSV or JSON.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "boundpair/scans.hpp"

namespace boundpair {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, std::string> metadata;  // params, version, wall time

  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

Format parse_format(const std::string& name);

/// Columns axis, re_eps, im_eps, decay, classification, residual. Points
/// without a bound state keep the axis value and carry "none" in
/// classification with NaN numbers.
Table scan_table(const ScanResult& scan);

/// Doubles with 17 significant digits, so a read back is bitwise exact.
std::string format_double(double x);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

/// Writes atomically through a temporary file; throws IoError and leaves no
/// partial file behind on failure.
void write_table(const Table& table, Format format, const std::filesystem::path& path);

/// Parses CSV written by to_csv. Cells that parse fully as numbers come back
/// as doubles, everything else as strings.
Table read_csv(const std::filesystem::path& path);

}  // namespace boundpair
