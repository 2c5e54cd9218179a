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

#ifndef AUTHSHIM_CLOCK_HPP
#define AUTHSHIM_CLOCK_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace authshim {

/// UTC instant at second granularity. All protocol timestamps use this.
using UtcTime =
    std::chrono::time_point<std::chrono::system_clock, std::chrono::seconds>;

inline UtcTime utc_now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(
      std::chrono::system_clock::now());
}

inline UtcTime utc_from_unix(std::int64_t seconds) {
  return UtcTime(std::chrono::seconds(seconds));
}

inline std::int64_t unix_seconds(UtcTime t) {
  return t.time_since_epoch().count();
}

/// "2026-08-11T12:34:56Z" — the only timestamp shape used on the wire.
std::string format_iso8601(UtcTime t);
std::optional<UtcTime> parse_iso8601(std::string_view s);

}  // namespace authshim

#endif  // AUTHSHIM_CLOCK_HPP
