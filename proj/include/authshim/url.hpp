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

#ifndef AUTHSHIM_URL_HPP
#define AUTHSHIM_URL_HPP

#include <optional>
#include <string>
#include <string_view>

namespace authshim {

/// Just enough URL handling for config validation and the in-process browser.
struct Url {
  std::string scheme;
  std::string host;
  int port = 0;  // resolved: explicit port or scheme default
  std::string path;   // always starts with '/'
  std::string query;  // without '?', may be empty

  std::string origin() const;  // "http://host:port"
  std::string target() const;  // path plus "?query" when non-empty
  std::string str() const;
};

std::optional<Url> parse_url(std::string_view s);

/// Appends a key=value pair, URL-encoding the value; picks '?' or '&'.
std::string append_query_param(const std::string& url, std::string_view key,
                               std::string_view value);

}  // namespace authshim

#endif  // AUTHSHIM_URL_HPP
