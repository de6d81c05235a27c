// Minimal RFC-4180 CSV reader/writer plus text formatting helpers used by
// every stage that produces files. Doubles are written with %.17g so a
// write/read round trip reproduces the exact bit pattern.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poincavec {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // column index by header name
  std::optional<std::size_t> column(std::string_view name) const;
};

// Quoted fields may contain commas, doubled quotes and newlines. CRLF and
// bare LF line endings are both accepted. path errors -> MissingFile,
// zero data rows -> EmptyFile.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::string_view text, std::string_view origin = "<memory>");

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::span<const std::string> fields);
  void row(std::initializer_list<std::string> fields);

 private:
  void* file_ = nullptr;
  std::string path_;
};

std::string csv_quote(std::string_view field);

// %.17g; shortest representation that round-trips IEEE-754 doubles
std::string format_double(double x);
// UTC calendar date from a unix timestamp, YYYY-MM-DD
std::string format_date(std::int64_t unix_seconds);

// strict full-string parses; empty or trailing garbage -> nullopt
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int64(std::string_view text);
std::optional<std::uint64_t> parse_uint64(std::string_view text);

std::string lowercase(std::string_view text);
std::string trim(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace poincavec
