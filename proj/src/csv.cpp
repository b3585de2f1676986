#include "calib/csv.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "calib/errors.hpp"

namespace calib {
namespace {

char field_separator(Locale locale) {
  return locale == Locale::Point ? ',' : ';';
}

std::string strip_utf8_bom(std::string line) {
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' &&
      line[2] == '\xBF')
    line.erase(0, 3);
  return line;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double parse_number(const std::string& field, Locale locale,
                    const std::filesystem::path& path, std::size_t row,
                    std::size_t col) {
  std::string norm = field;
  if (locale == Locale::Comma)
    for (char& c : norm)
      if (c == ',') c = '.';
  if (norm.empty())
    throw ParseError(path.string() + ": empty numeric field", row, col);
  double v = 0.0;
  const char* first = norm.data();
  const char* last = first + norm.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(path.string() + ": malformed number '" + field + "'", row,
                     col);
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(trim(line));
  if (!lines.empty()) lines.front() = trim(strip_utf8_bom(lines.front()));
  // Drop trailing blank lines; interior blanks stay errors.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void require_header(const std::vector<std::string>& lines,
                    const std::string& expected,
                    const std::filesystem::path& path) {
  if (lines.empty())
    throw ParseError(path.string() + ": empty file, expected header '" +
                         expected + "'",
                     1, 1);
  if (lines.front() != expected)
    throw ParseError(path.string() + ": expected header '" + expected +
                         "', got '" + lines.front() + "'",
                     1, 1);
}

}  // namespace

CalibrationData read_calibration_csv(const std::filesystem::path& first_stage,
                                     const std::filesystem::path& second_stage,
                                     Locale locale) {
  const char sep = field_separator(locale);
  CalibrationData data;

  {
    const auto lines = read_lines(first_stage);
    require_header(lines, std::string("x") + sep + "y", first_stage);
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const std::size_t row = r + 1;
      const auto fields = split_line(lines[r], sep);
      if (fields.size() != 2)
        throw ParseError(first_stage.string() + ": expected 2 fields, got " +
                             std::to_string(fields.size()),
                         row, 1);
      data.first_stage.emplace_back(
          parse_number(fields[0], locale, first_stage, row, 1),
          parse_number(fields[1], locale, first_stage, row, 2));
    }
  }

  {
    const auto lines = read_lines(second_stage);
    require_header(lines, "y0", second_stage);
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const std::size_t row = r + 1;
      const auto fields = split_line(lines[r], sep);
      if (fields.size() != 1)
        throw ParseError(second_stage.string() + ": expected 1 field, got " +
                             std::to_string(fields.size()),
                         row, 1);
      data.second_stage.push_back(
          parse_number(fields[0], locale, second_stage, row, 1));
    }
  }

  validate(data);
  return data;
}

std::string format_full(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;  // 32 bytes always fit the shortest double rendering
  return std::string(buf, ptr);
}

std::string format_display(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace calib
