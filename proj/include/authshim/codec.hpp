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

#ifndef AUTHSHIM_CODEC_HPP
#define AUTHSHIM_CODEC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace authshim::codec {

using Bytes = std::vector<std::uint8_t>;

std::string base64_encode(const Bytes& data);
std::string base64_encode(std::string_view data);
std::optional<Bytes> base64_decode(std::string_view text);

// URL-safe alphabet, no padding. Used for cookie payload segments.
std::string base64url_encode(const Bytes& data);
std::string base64url_encode(std::string_view data);
std::optional<Bytes> base64url_decode(std::string_view text);

std::string hex_encode(const Bytes& data);

// Percent-encoding per RFC 3986; encode everything outside the unreserved set.
std::string url_encode(std::string_view s);
std::optional<std::string> url_decode(std::string_view s);

// Raw DEFLATE (no zlib/gzip wrapper), as required by the SAML HTTP-Redirect
// binding. Inflate output is capped to keep hostile input from ballooning.
Bytes deflate_raw(std::string_view data);
std::optional<std::string> inflate_raw(const Bytes& data,
                                       std::size_t max_output = 1 << 20);

std::string to_string(const Bytes& data);
Bytes to_bytes(std::string_view s);

// Timing-safe equality for MAC comparisons.
bool constant_time_eq(std::string_view a, std::string_view b);

}  // namespace authshim::codec

#endif  // AUTHSHIM_CODEC_HPP
