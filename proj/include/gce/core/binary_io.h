/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>

// Little-endian scalars and u32-length-prefixed strings. Readers throw E with
// `context` in the message on truncation.
namespace gce::bin {

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::is_arithmetic_v<T>);
  std::array<char, sizeof(T)> b{};
  std::uint64_t u = 0;
  if constexpr (sizeof(T) == 8) {
    u = std::bit_cast<std::uint64_t>(v);
  } else {
    u = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

template <typename T, typename E>
T get(std::istream& in, std::string_view context) {
  static_assert(std::is_arithmetic_v<T>);
  std::array<unsigned char, sizeof(T)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!in) throw E(std::string(context) + ": truncated file");
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  if constexpr (sizeof(T) == 8) {
    return std::bit_cast<T>(u);
  } else {
    return static_cast<T>(u);
  }
}

inline void put_string(std::ostream& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename E>
std::string get_string(std::istream& in, std::string_view context) {
  const auto n = get<std::uint32_t, E>(in, context);
  if (n > (1u << 20)) throw E(std::string(context) + ": implausible string length");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw E(std::string(context) + ": truncated file");
  return s;
}

}  // namespace gce::bin
