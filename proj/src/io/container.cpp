#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <zlib.h>

#include "hints/error.hpp"
#include "hints/io.hpp"

namespace hints::io {

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t at) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<T>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  return v;
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* data = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

constexpr std::size_t kHeader = 8 + 4 + 8;

}  // namespace

std::string encode_container(const char (&magic)[8], std::uint32_t version, std::string_view metadata,
                             std::span<const double> values) {
  std::string out;
  out.reserve(kHeader + metadata.size() + 8 + 8 * values.size() + 4);
  out.append(magic, 8);
  put_le<std::uint32_t>(out, version);
  put_le<std::uint64_t>(out, metadata.size());
  out.append(metadata);
  put_le<std::uint64_t>(out, values.size());
  for (double v : values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  put_le<std::uint32_t>(out, crc32_of(out));
  return out;
}

Container decode_container(std::string_view bytes, const char (&magic)[8], std::uint32_t version) {
  require(bytes.size() >= kHeader + 8 + 4, ErrorCode::CorruptChecksum, "container is truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  require(crc32_of(body) == get_le<std::uint32_t>(bytes, bytes.size() - 4), ErrorCode::CorruptChecksum,
          "container checksum mismatch");
  require(std::memcmp(bytes.data(), magic, 8) == 0, ErrorCode::FormatVersionMismatch,
          "unexpected container magic");
  Container c;
  c.version = get_le<std::uint32_t>(bytes, 8);
  require(c.version == version, ErrorCode::FormatVersionMismatch,
          "container version " + std::to_string(c.version) + ", expected " + std::to_string(version));
  const auto md_len = get_le<std::uint64_t>(bytes, 12);
  require(md_len <= body.size() - kHeader - 8, ErrorCode::CorruptChecksum, "metadata length out of range");
  c.metadata.assign(body.substr(kHeader, md_len));
  const std::size_t at = kHeader + md_len;
  const auto count = get_le<std::uint64_t>(bytes, at);
  require(body.size() - at - 8 == count * 8, ErrorCode::CorruptChecksum, "payload length mismatch");
  c.values.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    c.values[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, at + 8 + 8 * i));
  return c;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> parse_metadata(std::string_view text) {
  std::map<std::string, std::string> md;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    const auto eq = line.find('=');
    if (eq != std::string_view::npos) md[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
    pos = end + 1;
  }
  return md;
}

const std::string& metadata_value(const std::map<std::string, std::string>& md, const std::string& key) {
  const auto it = md.find(key);
  if (it == md.end()) fail(ErrorCode::CorruptChecksum, "container metadata lacks '" + key + "'");
  return it->second;
}

}  // namespace hints::io
