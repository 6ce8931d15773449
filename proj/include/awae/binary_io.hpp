#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "awae/errors.hpp"

namespace awae::io {

// Little-endian binary field helpers for the DFM1/DFP1 blob formats.
// Host is assumed little-endian (x86-64 / aarch64 targets).

template <class T>
void write_pod(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw ParseError("binary blob truncated");
  return value;
}

inline void write_f64_vec(std::ostream& os, const std::vector<double>& v) {
  write_pod<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> read_f64_vec(std::istream& is) {
  auto n = read_pod<std::uint64_t>(is);
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw ParseError("binary blob truncated");
  return v;
}

inline void write_i32_vec(std::ostream& os, const std::vector<std::int32_t>& v) {
  write_pod<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(std::int32_t)));
}

inline std::vector<std::int32_t> read_i32_vec(std::istream& is) {
  auto n = read_pod<std::uint64_t>(is);
  std::vector<std::int32_t> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(std::int32_t)));
  if (!is) throw ParseError("binary blob truncated");
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  const auto n = read_pod<std::uint32_t>(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw ParseError("binary blob truncated");
  return s;
}

inline void write_magic(std::ostream& os, const char magic[4]) {
  os.write(magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[4]) {
  char buf[4] = {};
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw ParseError(std::string("bad magic, expected ") +
                     std::string(magic, 4));
}

}  // namespace awae::io
