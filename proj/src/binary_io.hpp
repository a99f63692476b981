#pragma once

#include "pulsebench/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace pulsebench::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class ByteWriter {
 public:
  void magic(std::string_view m) { out_.append(m); }
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void bytes(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string_view format) : bytes_(bytes), format_(format) {}

  void expect_header(std::string_view magic, std::uint32_t version) {
    need(magic.size());
    if (bytes_.substr(pos_, magic.size()) != magic) {
      throw FormatError(std::string(format_) + ": bad magic bytes");
    }
    pos_ += magic.size();
    const auto v = get<std::uint32_t>();
    if (v != version) {
      throw FormatError(std::string(format_) + ": unsupported version " + std::to_string(v));
    }
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) throw FormatError(std::string(format_) + ": trailing bytes");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string(format_) + ": truncated file");
  }
  std::string_view bytes_;
  std::string_view format_;
  std::size_t pos_{0};
};

}  // namespace pulsebench::detail
