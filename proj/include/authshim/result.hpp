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

#ifndef AUTHSHIM_RESULT_HPP
#define AUTHSHIM_RESULT_HPP

#include <cassert>
#include <utility>
#include <variant>

namespace authshim {

/// Minimal value-or-error carrier. Every fallible operation in the login
/// pipeline returns one of these; there is no half-validated state to leak.
template <typename T, typename E>
class Result {
 public:
  Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Result(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<0>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<0>(v_);
  }
  E& error() {
    assert(!ok());
    return std::get<1>(v_);
  }
  const E& error() const {
    assert(!ok());
    return std::get<1>(v_);
  }

  T take() { return std::move(std::get<0>(v_)); }
  E take_error() { return std::move(std::get<1>(v_)); }

 private:
  std::variant<T, E> v_;
};

/// Unit type for Result<Unit, E> when an operation returns nothing.
struct Unit {};

}  // namespace authshim

#endif  // AUTHSHIM_RESULT_HPP
