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

#ifndef AUTHSHIM_CRYPTO_HPP
#define AUTHSHIM_CRYPTO_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "authshim/codec.hpp"
#include "authshim/result.hpp"

namespace authshim::crypto {

using codec::Bytes;

Bytes sha256(std::string_view data);
Bytes hmac_sha256(std::string_view key, std::string_view data);
Bytes random_bytes(std::size_t n);

/// RSA private key handle (OpenSSL EVP_PKEY underneath).
class PrivateKey {
 public:
  PrivateKey();
  PrivateKey(PrivateKey&&) noexcept;
  PrivateKey& operator=(PrivateKey&&) noexcept;
  ~PrivateKey();

  bool valid() const { return pkey_ != nullptr; }
  std::string to_pem() const;

  static PrivateKey generate_rsa(int bits = 2048);
  static std::optional<PrivateKey> from_pem(std::string_view pem);

  void* handle() const { return pkey_; }  // EVP_PKEY*

 private:
  void* pkey_ = nullptr;
};

/// X.509 certificate carrying the signer's public key. Trust in this
/// profile is byte-equality of the DER encoding against the configured
/// certificate, not chain validation.
class Certificate {
 public:
  Certificate();
  Certificate(const Certificate&);
  Certificate& operator=(const Certificate&);
  Certificate(Certificate&&) noexcept;
  Certificate& operator=(Certificate&&) noexcept;
  ~Certificate();

  bool valid() const { return x509_ != nullptr; }
  const Bytes& der() const { return der_; }
  std::string to_pem() const;
  std::string sha256_fingerprint() const;  // hex

  /// Accepts PEM text or raw DER bytes.
  static std::optional<Certificate> load(std::string_view pem_or_der);
  static std::optional<Certificate> from_der(const Bytes& der);

  /// Self-signed certificate for the given key; used by the mock IdP's
  /// ephemeral identities and by test fixtures.
  static Certificate self_signed(const PrivateKey& key,
                                 const std::string& common_name,
                                 int days_valid = 3650);

  void* handle() const { return x509_; }  // X509*

 private:
  void* x509_ = nullptr;
  Bytes der_;
};

/// RSA-SHA256 (PKCS#1 v1.5), the only signature algorithm in this profile.
Bytes rsa_sha256_sign(const PrivateKey& key, std::string_view data);
bool rsa_sha256_verify(const Certificate& cert, std::string_view data,
                       const Bytes& signature);

}  // namespace authshim::crypto

#endif  // AUTHSHIM_CRYPTO_HPP
