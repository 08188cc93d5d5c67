#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace snrloss::app {

/// RFC 4180 table: CRLF line ends, fields quoted only when they contain a
/// comma, quote, CR or LF. The first row is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const CsvTable&) const = default;
};

/// Shortest decimal text that parses back to the same double ('.' separator,
/// locale independent). Non-finite values become empty fields.
std::string format_number(double x);

std::string write_csv(const CsvTable& table);
/// Throws Error(kConfigError) on unterminated quotes, stray quotes or ragged rows.
CsvTable parse_csv(std::string_view text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Writes `stem`.csv and `stem`.json (the sidecar) into `dir`; returns the CSV path.
std::filesystem::path write_csv_with_sidecar(const std::filesystem::path& dir, const std::string& stem,
                                             const CsvTable& table, nlohmann::json sidecar);

}  // namespace snrloss::app
