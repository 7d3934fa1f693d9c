#include "finsent/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "finsent/error.hpp"

namespace finsent::io {

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileWriteFailed, tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::FileWriteFailed, tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::FileWriteFailed, path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BinaryWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::f64s(std::span<const double> values) {
  for (double v : values) f64(v);
}

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  bytes(s);
}

void BinaryReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) throw Error(ErrorCode::BadFormat, "truncated binary file");
}

std::uint8_t BinaryReader::u8() {
  need(1);
  return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t BinaryReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
  return v;
}

std::uint64_t BinaryReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

void BinaryReader::f64s(std::span<double> out) {
  need(out.size() * 8);
  for (double& v : out) v = f64();
}

std::string BinaryReader::bytes(std::size_t n) {
  need(n);
  std::string s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::string BinaryReader::str() {
  std::uint64_t n = u64();
  return bytes(static_cast<std::size_t>(n));
}

}  // namespace finsent::io
