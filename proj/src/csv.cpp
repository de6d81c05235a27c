#include "poincavec/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "poincavec/errors.hpp"

namespace poincavec {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

// One record per call; handles quoted fields spanning newlines.
// Returns false when the input is exhausted.
bool next_record(std::string_view text, std::size_t& pos,
                 std::vector<std::string>& out, std::string_view origin) {
  if (pos >= text.size()) return false;
  out.clear();
  std::string field;
  bool in_quotes = false;
  bool field_started_quoted = false;
  for (;;) {
    if (pos >= text.size()) {
      if (in_quotes) {
        fail(ErrorCode::EmptyFile,
             std::string(origin) + ": unterminated quoted field");
      }
      out.push_back(std::move(field));
      return true;
    }
    char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        field.push_back(c);
        ++pos;
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_started_quoted) {
      in_quotes = true;
      field_started_quoted = true;
      ++pos;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
      ++pos;
    } else if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
      out.push_back(std::move(field));
      pos += 2;
      return true;
    } else if (c == '\n') {
      out.push_back(std::move(field));
      ++pos;
      return true;
    } else {
      field.push_back(c);
      ++pos;
    }
  }
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string_view origin) {
  CsvTable table;
  std::size_t pos = 0;
  std::vector<std::string> record;
  if (!next_record(text, pos, record, origin)) {
    fail(ErrorCode::EmptyFile, std::string(origin) + ": no header row");
  }
  table.header = std::move(record);
  while (next_record(text, pos, record, origin)) {
    // a trailing newline yields one empty single-field record; drop it
    if (record.size() == 1 && record[0].empty() && pos >= text.size()) break;
    table.rows.push_back(std::move(record));
  }
  if (table.rows.empty()) {
    fail(ErrorCode::EmptyFile, std::string(origin) + ": no data rows");
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  return parse_csv(read_text_file(path), path);
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorCode::MissingFile, "cannot open for writing: " + path);
  file_ = f;
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(static_cast<std::FILE*>(file_));
}

void CsvWriter::row(std::span<const std::string> fields) {
  std::FILE* f = static_cast<std::FILE*>(file_);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) std::fputc(',', f);
    std::string q = csv_quote(fields[i]);
    std::fwrite(q.data(), 1, q.size(), f);
  }
  std::fputc('\n', f);
}

void CsvWriter::row(std::initializer_list<std::string> fields) {
  row(std::span<const std::string>(fields.begin(), fields.size()));
}

std::string csv_quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

std::string format_date(std::int64_t unix_seconds) {
  // civil-from-days; avoids gmtime_r locale quirks and 32-bit year limits
  std::int64_t days = unix_seconds / 86400;
  if (unix_seconds % 86400 < 0) --days;
  std::int64_t z = days + 719468;
  std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  std::uint64_t doe = static_cast<std::uint64_t>(z - era * 146097);
  std::uint64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  std::uint64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  std::uint64_t mp = (5 * doy + 2) / 153;
  std::uint64_t d = doy - (153 * mp + 2) / 5 + 1;
  std::uint64_t m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02llu-%02llu",
                static_cast<long long>(y), static_cast<unsigned long long>(m),
                static_cast<unsigned long long>(d));
  return std::string(buf);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int64(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::optional<std::uint64_t> parse_uint64(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingFile, "cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::MissingFile, "cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace poincavec
