#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "replan/error.h"

namespace replan::detail {

// 64-bit FNV-1a.
struct fnv1a {
  void add(std::span<std::uint8_t const> const bytes) {
    for (auto const b : bytes) {
      h_ ^= b;
      h_ *= 0x100000001b3ULL;
    }
  }

  std::uint64_t h_{0xcbf29ce484222325ULL};
};

inline std::uint64_t fnv1a_hash(std::span<std::uint8_t const> const bytes) {
  fnv1a h;
  h.add(bytes);
  return h.h_;
}

// Little-endian on the supported (x86-64 / aarch64) targets.
class writer {
public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T const v) {
    auto const old = buf_.size();
    buf_.resize(old + sizeof(T));
    std::memcpy(buf_.data() + old, &v, sizeof(T));
  }

  void put_string(std::string_view const s) {
    put(static_cast<std::uint32_t>(s.size()));
    buf_.insert(end(buf_), begin(s), end(s));
  }

  void put_bytes(std::span<std::uint8_t const> const b) {
    buf_.insert(end(buf_), begin(b), end(b));
  }

  std::vector<std::uint8_t>& buf() { return buf_; }

private:
  std::vector<std::uint8_t> buf_;
};

class reader {
public:
  reader(std::span<std::uint8_t const> const data, std::string what)
      : data_{data}, what_{std::move(what)} {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string() {
    auto const n = get<std::uint32_t>();
    need(n);
    auto s = std::string{reinterpret_cast<char const*>(data_.data() + pos_), n};
    pos_ += n;
    return s;
  }

  std::span<std::uint8_t const> rest() const { return data_.subspan(pos_); }
  bool done() const { return pos_ == data_.size(); }

private:
  void need(std::size_t const n) const {
    if (pos_ + n > data_.size()) {
      throw error{error_kind::parse, what_ + ": truncated file"};
    }
  }

  std::span<std::uint8_t const> data_;
  std::size_t pos_{0};
  std::string what_;
};

std::vector<std::uint8_t> read_file(std::filesystem::path const&);
void write_file(std::filesystem::path const&, std::span<std::uint8_t const>);

}  // namespace replan::detail
