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

#include "authshim/url.hpp"

#include "authshim/codec.hpp"

namespace authshim {

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

std::string Url::target() const {
  return query.empty() ? path : path + "?" + query;
}

std::string Url::str() const {
  std::string out = scheme + "://" + host;
  const bool default_port =
      (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  if (!default_port) out += ":" + std::to_string(port);
  out += target();
  return out;
}

std::optional<Url> parse_url(std::string_view s) {
  Url u;
  const auto scheme_end = s.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) {
    return std::nullopt;
  }
  u.scheme = std::string(s.substr(0, scheme_end));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  s.remove_prefix(scheme_end + 3);

  const auto path_start = s.find('/');
  std::string_view authority =
      path_start == std::string_view::npos ? s : s.substr(0, path_start);
  std::string_view rest =
      path_start == std::string_view::npos ? "" : s.substr(path_start);
  if (authority.empty()) return std::nullopt;

  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    u.host = std::string(authority.substr(0, colon));
    const auto port_str = authority.substr(colon + 1);
    if (port_str.empty()) return std::nullopt;
    int port = 0;
    for (char c : port_str) {
      if (c < '0' || c > '9') return std::nullopt;
      port = port * 10 + (c - '0');
      if (port > 65535) return std::nullopt;
    }
    u.port = port;
  } else {
    u.host = std::string(authority);
    u.port = u.scheme == "https" ? 443 : 80;
  }
  if (u.host.empty()) return std::nullopt;

  const auto qmark = rest.find('?');
  if (qmark == std::string_view::npos) {
    u.path = rest.empty() ? "/" : std::string(rest);
  } else {
    u.path = qmark == 0 ? "/" : std::string(rest.substr(0, qmark));
    u.query = std::string(rest.substr(qmark + 1));
  }
  return u;
}

std::string append_query_param(const std::string& url, std::string_view key,
                               std::string_view value) {
  const char sep = url.find('?') == std::string::npos ? '?' : '&';
  return url + sep + std::string(key) + "=" + codec::url_encode(value);
}

}  // namespace authshim
