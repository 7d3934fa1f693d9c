#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace finsent::io {

/// Writes to "<path>.tmp" and renames over the target, so readers never see
/// a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Little-endian encoder.
class BinaryWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void f64s(std::span<const double> values);
  void bytes(std::string_view raw) { buf_.append(raw); }
  void str(std::string_view s);

  const std::string& buffer() const noexcept { return buf_; }

 private:
  std::string buf_;
};

/// Little-endian decoder; throws BadFormat on truncation.
class BinaryReader {
 public:
  explicit BinaryReader(std::string data) : data_(std::move(data)) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  void f64s(std::span<double> out);
  std::string bytes(std::size_t n);
  std::string str();

  bool at_end() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace finsent::io
