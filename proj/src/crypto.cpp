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

#include "authshim/crypto.hpp"

#include <openssl/bio.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/pem.h>
#include <openssl/rand.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <cstring>
#include <stdexcept>

namespace authshim::crypto {

namespace {

EVP_PKEY* as_pkey(void* p) { return static_cast<EVP_PKEY*>(p); }
X509* as_x509(void* p) { return static_cast<X509*>(p); }

std::string bio_to_string(BIO* bio) {
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio, &data);
  return std::string(data, static_cast<std::size_t>(len));
}

}  // namespace

Bytes sha256(std::string_view data) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
             nullptr);
  out.resize(len);
  return out;
}

Bytes hmac_sha256(std::string_view key, std::string_view data) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(data.data()), data.size(),
       out.data(), &len);
  out.resize(len);
  return out;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return out;
}

PrivateKey::PrivateKey() = default;

PrivateKey::PrivateKey(PrivateKey&& other) noexcept : pkey_(other.pkey_) {
  other.pkey_ = nullptr;
}

PrivateKey& PrivateKey::operator=(PrivateKey&& other) noexcept {
  if (this != &other) {
    if (pkey_) EVP_PKEY_free(as_pkey(pkey_));
    pkey_ = other.pkey_;
    other.pkey_ = nullptr;
  }
  return *this;
}

PrivateKey::~PrivateKey() {
  if (pkey_) EVP_PKEY_free(as_pkey(pkey_));
}

std::string PrivateKey::to_pem() const {
  BIO* bio = BIO_new(BIO_s_mem());
  PEM_write_bio_PrivateKey(bio, as_pkey(pkey_), nullptr, nullptr, 0, nullptr,
                           nullptr);
  std::string pem = bio_to_string(bio);
  BIO_free(bio);
  return pem;
}

PrivateKey PrivateKey::generate_rsa(int bits) {
  PrivateKey key;
  EVP_PKEY* pkey = EVP_RSA_gen(static_cast<unsigned int>(bits));
  key.pkey_ = pkey;
  return key;
}

std::optional<PrivateKey> PrivateKey::from_pem(std::string_view pem) {
  BIO* bio = BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size()));
  EVP_PKEY* pkey = PEM_read_bio_PrivateKey(bio, nullptr, nullptr, nullptr);
  BIO_free(bio);
  if (!pkey) return std::nullopt;
  PrivateKey key;
  key.pkey_ = pkey;
  return key;
}

Certificate::Certificate() = default;

Certificate::Certificate(const Certificate& other) : der_(other.der_) {
  if (other.x509_) {
    X509_up_ref(as_x509(other.x509_));
    x509_ = other.x509_;
  }
}

Certificate& Certificate::operator=(const Certificate& other) {
  if (this != &other) {
    if (x509_) X509_free(as_x509(x509_));
    x509_ = other.x509_;
    if (x509_) X509_up_ref(as_x509(x509_));
    der_ = other.der_;
  }
  return *this;
}

Certificate::Certificate(Certificate&& other) noexcept
    : x509_(other.x509_), der_(std::move(other.der_)) {
  other.x509_ = nullptr;
}

Certificate& Certificate::operator=(Certificate&& other) noexcept {
  if (this != &other) {
    if (x509_) X509_free(as_x509(x509_));
    x509_ = other.x509_;
    der_ = std::move(other.der_);
    other.x509_ = nullptr;
  }
  return *this;
}

Certificate::~Certificate() {
  if (x509_) X509_free(as_x509(x509_));
}

std::string Certificate::to_pem() const {
  BIO* bio = BIO_new(BIO_s_mem());
  PEM_write_bio_X509(bio, as_x509(x509_));
  std::string pem = bio_to_string(bio);
  BIO_free(bio);
  return pem;
}

std::string Certificate::sha256_fingerprint() const {
  return codec::hex_encode(sha256(std::string_view(
      reinterpret_cast<const char*>(der_.data()), der_.size())));
}

std::optional<Certificate> Certificate::load(std::string_view pem_or_der) {
  if (pem_or_der.find("-----BEGIN CERTIFICATE-----") != std::string::npos) {
    BIO* bio =
        BIO_new_mem_buf(pem_or_der.data(), static_cast<int>(pem_or_der.size()));
    X509* x = PEM_read_bio_X509(bio, nullptr, nullptr, nullptr);
    BIO_free(bio);
    if (!x) return std::nullopt;
    Certificate cert;
    cert.x509_ = x;
    unsigned char* der = nullptr;
    const int len = i2d_X509(x, &der);
    if (len <= 0) return std::nullopt;
    cert.der_.assign(der, der + len);
    OPENSSL_free(der);
    return cert;
  }
  return from_der(Bytes(pem_or_der.begin(), pem_or_der.end()));
}

std::optional<Certificate> Certificate::from_der(const Bytes& der) {
  const unsigned char* p = der.data();
  X509* x = d2i_X509(nullptr, &p, static_cast<long>(der.size()));
  if (!x) return std::nullopt;
  Certificate cert;
  cert.x509_ = x;
  cert.der_ = der;
  return cert;
}

Certificate Certificate::self_signed(const PrivateKey& key,
                                     const std::string& common_name,
                                     int days_valid) {
  X509* x = X509_new();
  X509_set_version(x, 2);
  ASN1_INTEGER_set(X509_get_serialNumber(x), 1);
  X509_gmtime_adj(X509_getm_notBefore(x), 0);
  X509_gmtime_adj(X509_getm_notAfter(x), 60L * 60 * 24 * days_valid);
  X509_set_pubkey(x, as_pkey(key.handle()));
  X509_NAME* name = X509_get_subject_name(x);
  X509_NAME_add_entry_by_txt(
      name, "CN", MBSTRING_ASC,
      reinterpret_cast<const unsigned char*>(common_name.c_str()), -1, -1, 0);
  X509_set_issuer_name(x, name);
  X509_sign(x, as_pkey(key.handle()), EVP_sha256());

  Certificate cert;
  cert.x509_ = x;
  unsigned char* der = nullptr;
  const int len = i2d_X509(x, &der);
  cert.der_.assign(der, der + len);
  OPENSSL_free(der);
  return cert;
}

Bytes rsa_sha256_sign(const PrivateKey& key, std::string_view data) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Bytes sig;
  size_t sig_len = 0;
  if (EVP_DigestSignInit(ctx, nullptr, EVP_sha256(), nullptr,
                         as_pkey(key.handle())) == 1 &&
      EVP_DigestSign(ctx, nullptr, &sig_len,
                     reinterpret_cast<const unsigned char*>(data.data()),
                     data.size()) == 1) {
    sig.resize(sig_len);
    if (EVP_DigestSign(ctx, sig.data(), &sig_len,
                       reinterpret_cast<const unsigned char*>(data.data()),
                       data.size()) == 1) {
      sig.resize(sig_len);
    } else {
      sig.clear();
    }
  }
  EVP_MD_CTX_free(ctx);
  if (sig.empty()) throw std::runtime_error("RSA-SHA256 signing failed");
  return sig;
}

bool rsa_sha256_verify(const Certificate& cert, std::string_view data,
                       const Bytes& signature) {
  EVP_PKEY* pub = X509_get0_pubkey(as_x509(cert.handle()));
  if (!pub) return false;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  bool ok = false;
  if (EVP_DigestVerifyInit(ctx, nullptr, EVP_sha256(), nullptr, pub) == 1) {
    ok = EVP_DigestVerify(
             ctx, signature.data(), signature.size(),
             reinterpret_cast<const unsigned char*>(data.data()),
             data.size()) == 1;
  }
  EVP_MD_CTX_free(ctx);
  return ok;
}

}  // namespace authshim::crypto
