#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace lightcone::report {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Homogeneous records: every row has one cell per header column.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

Format format_from_string(std::string_view name);

/// Shortest representation that parses back to the same double; "inf",
/// "-inf", "nan" for non-finite values.
std::string format_double(double v);

std::string to_csv(const Table& t);
/// Array of objects keyed by the header names.
nlohmann::json to_json(const Table& t);

std::string render(const Table& t, Format format);

/// Writes `text` to `path`, or to `console` when path is "-". Throws IoError.
void write_text(const std::string& path, const std::string& text, std::ostream& console);
void write_text(const std::string& path, const std::string& text);

void emit_report(const Table& t, Format format, const std::string& path);

}  // namespace lightcone::report
