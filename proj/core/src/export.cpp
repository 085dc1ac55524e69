#include "boundpair/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace boundpair {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DomainError("table row has the wrong number of cells");
  rows.push_back(std::move(row));
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw DomainError("unknown output format '" + name + "' (expected csv or json)");
}

Table scan_table(const ScanResult& scan) {
  Table t;
  t.columns = {scan.axis_name.empty() ? "axis" : scan.axis_name, "re_eps", "im_eps", "decay", "classification",
               "residual"};
  t.metadata["grid_hash"] = scan.grid_hash;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : scan.points) {
    if (p.ok)
      t.add_row({p.axis, p.energy.re, p.energy.im, p.decay, std::string(to_string(p.kind)), p.residual});
    else
      t.add_row({p.axis, nan, nan, nan, std::string("none"), nan});
  }
  return t;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

Cell parse_cell(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty()) return v;
  return s;
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return nullptr;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << cell_text(table.columns[c]);
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
    os << '\n';
  }
  return os.str();
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cols = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) arr.push_back(json_cell(row[c]));
    cols[table.columns[c]] = std::move(arr);
  }
  j["columns"] = std::move(cols);
  j["metadata"] = table.metadata;
  return j.dump(2) + "\n";
}

void write_table(const Table& table, Format format, const std::filesystem::path& path) {
  const std::string text = format == Format::csv ? to_csv(table) : to_json(table);
  auto tmp = path;
  tmp += ".part";
  std::error_code ec;
  {
    std::ofstream out(tmp, std::ios::binary);
    if (out) out << text;
    out.close();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot write " + path.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Cell> row;
    for (const auto& s : split_csv_line(line)) row.push_back(parse_cell(s));
    if (row.size() != t.columns.size()) throw IoError(path.string() + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace boundpair
