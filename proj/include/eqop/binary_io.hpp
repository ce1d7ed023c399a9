#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eqop/errors.hpp"

namespace eqop::io {

/// Little-endian byte sink.
class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void tag(std::string_view magic) { bytes(magic.data(), magic.size()); }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  const std::vector<std::uint8_t>& data() const { return buf_; }

 private:
  template <typename T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked byte source; every failure reports the byte offset.
class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  void expect_tag(std::string_view magic, const std::string& what) {
    need(magic.size(), what + " magic");
    if (std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0) {
      throw ParseError("bad " + what + " magic, expected '" + std::string(magic) + "'", pos_);
    }
    pos_ += magic.size();
  }
  std::uint8_t u8() {
    need(1, "u8");
    return data_[pos_++];
  }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string str() {
    const auto n = u32();
    need(n, "string");
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  /// Big-endian u32 (IDX headers).
  std::uint32_t u32_be() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  const std::uint8_t* take(std::size_t n, const std::string& what) {
    need(n, what);
    const auto* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  void need(std::size_t n, const std::string& what) const {
    if (remaining() < n) throw ParseError("truncated input while reading " + what, pos_);
  }
  template <typename T>
  T get() {
    need(sizeof(T), "integer");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  const std::vector<std::uint8_t>& data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const void* data, std::size_t n);
void write_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& data);
void write_atomic(const std::filesystem::path& path, std::string_view text);

/// 64-bit FNV-1a, used for artifact and config fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace eqop::io
