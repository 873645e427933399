#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hints/error.hpp"
#include "hints/io.hpp"

namespace hints::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  std::string s(text);
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  require(!s.empty() && end == s.c_str() + s.size(), ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  return v;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { add_row(std::move(header)); }

void CsvWriter::add_row(std::vector<std::string> cells) {
  require(cells.size() == columns_, ErrorCode::SizeMismatch, "CSV row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(std::move(cells));
}

std::string CsvWriter::str() const { return text_; }

void CsvWriter::save(const std::filesystem::path& path) const { write_file(path, text_); }

}  // namespace hints::io
