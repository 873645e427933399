#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hints::io {

/// 17 significant digits, so the text parses back bit-identically.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Versioned binary container:
///   8 magic bytes | u32 LE version | u64 LE metadata length | metadata text |
///   u64 LE value count | f64 LE values | u32 LE CRC-32 of everything before it.
struct Container {
  std::uint32_t version = 0;
  std::string metadata;
  std::vector<double> values;
};

std::string encode_container(const char (&magic)[8], std::uint32_t version, std::string_view metadata,
                             std::span<const double> values);
/// Throws CorruptChecksum on truncation or CRC failure, FormatVersionMismatch on wrong magic or version.
Container decode_container(std::string_view bytes, const char (&magic)[8], std::uint32_t version);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// key=value lines; later duplicates overwrite.
std::map<std::string, std::string> parse_metadata(std::string_view text);
const std::string& metadata_value(const std::map<std::string, std::string>& md, const std::string& key);

/// Writes rows of a CSV table; numbers go through format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  void add_row(std::span<const double> values);
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace hints::io
