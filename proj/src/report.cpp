#include "lightcone/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <fstream>
#include <iostream>

#include "lightcone/errors.hpp"

namespace lightcone::report {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != header.size())
    throw ArgumentError(fmt::format("row has {} cells, header has {}", row.size(), header.size()));
  rows.push_back(std::move(row));
}

Format format_from_string(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ArgumentError(fmt::format("unknown output format '{}'", name));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.header[i]] = cell_json(row[i]);
    out.push_back(std::move(obj));
  }
  return out;
}

std::string render(const Table& t, Format format) {
  if (format == Format::csv) return to_csv(t);
  return to_json(t).dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text, std::ostream& console) {
  if (path == "-") {
    console << text;
    console.flush();
    if (!console) throw IoError("failed to write to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path));
  f << text;
  f.close();
  if (!f) throw IoError(fmt::format("failed to write '{}'", path));
}

void write_text(const std::string& path, const std::string& text) {
  write_text(path, text, std::cout);
}

void emit_report(const Table& t, Format format, const std::string& path) {
  write_text(path, render(t, format));
}

}  // namespace lightcone::report
