/*
 * Copyright 2026 The Auth Shim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "authshim/codec.hpp"

#include <zlib.h>

#include <array>
#include <cstring>

namespace authshim::codec {

namespace {

constexpr char kStdAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr char kUrlAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string b64_encode_impl(const std::uint8_t* data, std::size_t len,
                            const char* alphabet, bool pad) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= len) {
    std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += alphabet[(n >> 6) & 63];
    out += alphabet[n & 63];
    i += 3;
  }
  const std::size_t rem = len - i;
  if (rem == 1) {
    std::uint32_t n = data[i] << 16;
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    if (pad) out += "==";
  } else if (rem == 2) {
    std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += alphabet[(n >> 6) & 63];
    if (pad) out += '=';
  }
  return out;
}

std::array<int8_t, 256> build_rev(const char* alphabet) {
  std::array<int8_t, 256> rev{};
  rev.fill(-1);
  for (int i = 0; i < 64; ++i) {
    rev[static_cast<unsigned char>(alphabet[i])] = static_cast<int8_t>(i);
  }
  return rev;
}

std::optional<Bytes> b64_decode_impl(std::string_view text,
                                     const std::array<int8_t, 256>& rev) {
  Bytes out;
  out.reserve(text.size() / 4 * 3 + 3);
  std::uint32_t acc = 0;
  int bits = 0;
  std::size_t pad_seen = 0;
  for (char c : text) {
    if (c == '\r' || c == '\n') continue;  // tolerate wrapped PEM-style input
    if (c == '=') {
      ++pad_seen;
      continue;
    }
    if (pad_seen > 0) return std::nullopt;  // data after padding
    const int8_t v = rev[static_cast<unsigned char>(c)];
    if (v < 0) return std::nullopt;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  // Leftover bits must be zero-padding of a legal final quantum.
  if (bits >= 6) return std::nullopt;
  if ((acc & ((1u << bits) - 1u)) != 0) return std::nullopt;
  return out;
}

const std::array<int8_t, 256> kStdRev = build_rev(kStdAlphabet);
const std::array<int8_t, 256> kUrlRev = build_rev(kUrlAlphabet);

bool is_unreserved(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.' || c == '~';
}

int hex_val(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string base64_encode(const Bytes& data) {
  return b64_encode_impl(data.data(), data.size(), kStdAlphabet, true);
}

std::string base64_encode(std::string_view data) {
  return b64_encode_impl(reinterpret_cast<const std::uint8_t*>(data.data()),
                         data.size(), kStdAlphabet, true);
}

std::optional<Bytes> base64_decode(std::string_view text) {
  return b64_decode_impl(text, kStdRev);
}

std::string base64url_encode(const Bytes& data) {
  return b64_encode_impl(data.data(), data.size(), kUrlAlphabet, false);
}

std::string base64url_encode(std::string_view data) {
  return b64_encode_impl(reinterpret_cast<const std::uint8_t*>(data.data()),
                         data.size(), kUrlAlphabet, false);
}

std::optional<Bytes> base64url_decode(std::string_view text) {
  return b64_decode_impl(text, kUrlRev);
}

std::string hex_encode(const Bytes& data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

std::string url_encode(std::string_view s) {
  static const char* digits = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (is_unreserved(c)) {
      out += c;
    } else {
      const auto b = static_cast<unsigned char>(c);
      out += '%';
      out += digits[b >> 4];
      out += digits[b & 15];
    }
  }
  return out;
}

std::optional<std::string> url_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '%') {
      if (i + 2 >= s.size()) return std::nullopt;
      const int hi = hex_val(s[i + 1]);
      const int lo = hex_val(s[i + 2]);
      if (hi < 0 || lo < 0) return std::nullopt;
      out += static_cast<char>((hi << 4) | lo);
      i += 2;
    } else if (c == '+') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

Bytes deflate_raw(std::string_view data) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  // windowBits = -15 selects a raw deflate stream.
  deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY);
  Bytes out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

std::optional<std::string> inflate_raw(const Bytes& data,
                                       std::size_t max_output) {
  z_stream zs;
  std::memset(&zs, 0, sizeof(zs));
  if (inflateInit2(&zs, -15) != Z_OK) return std::nullopt;
  std::string out;
  std::array<char, 16384> buf;
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf.data());
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      return std::nullopt;
    }
    out.append(buf.data(), buf.size() - zs.avail_out);
    if (out.size() > max_output) {
      inflateEnd(&zs);
      return std::nullopt;
    }
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      return std::nullopt;  // truncated stream
    }
  }
  inflateEnd(&zs);
  return out;
}

std::string to_string(const Bytes& data) {
  return std::string(reinterpret_cast<const char*>(data.data()), data.size());
}

Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

bool constant_time_eq(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  unsigned char acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc |= static_cast<unsigned char>(a[i]) ^ static_cast<unsigned char>(b[i]);
  }
  return acc == 0;
}

}  // namespace authshim::codec
