// Little-endian helpers for the binary matrix and cube formats.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stacc::detail {

inline void put_u32(std::ostream& out, std::uint32_t v)
{
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(const unsigned char* b)
{
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

/// Writes doubles narrowed to float32, little-endian.
inline void put_f32_array(std::ostream& out, std::span<const double> values)
{
  std::vector<unsigned char> buf(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    buf[4 * i] = static_cast<unsigned char>(bits);
    buf[4 * i + 1] = static_cast<unsigned char>(bits >> 8);
    buf[4 * i + 2] = static_cast<unsigned char>(bits >> 16);
    buf[4 * i + 3] = static_cast<unsigned char>(bits >> 24);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

inline std::vector<double> get_f32_array(const unsigned char* data, std::size_t count)
{
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<float>(get_u32(data + 4 * i));
  return out;
}

inline std::vector<unsigned char> slurp(std::istream& in)
{
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace stacc::detail
