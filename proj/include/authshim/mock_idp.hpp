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

#ifndef AUTHSHIM_MOCK_IDP_HPP
#define AUTHSHIM_MOCK_IDP_HPP

#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "authshim/clock.hpp"
#include "authshim/crypto.hpp"
#include "authshim/result.hpp"
#include "authshim/xml.hpp"

namespace authshim::mockidp {

struct IdpDirectoryEntry {
  std::string email;
  std::string display_name;
  std::vector<std::string> groups;
};

/// One protocol fault per issued response. Every mode lands on a distinct
/// rejection in the consuming pipeline.
enum class FaultMode {
  None,
  OmitGroups,
  EmptyGroups,
  Expired,
  NotYetValid,
  BadSignature,
  WrongAudience,
  WrongIssuer,
  UnsolicitedResponse,
  ForeignCertificate,
};

std::optional<FaultMode> parse_fault(std::string_view name);
std::string_view to_string(FaultMode mode);

/// Embeds an RSA-SHA256 signature over the canonical assertion bytes plus
/// the signer certificate. Verification recomputes the same canonical form.
void sign_assertion(xml::Element& assertion, const crypto::PrivateKey& key,
                    const crypto::Certificate& cert);

struct MockIdpOptions {
  std::string entity_id = "urn:mock-idp";
  std::vector<IdpDirectoryEntry> directory;
  std::optional<std::string> signing_key_pem;  // generated when absent
};

/// Test-harness identity provider. Consumes redirect-binding requests and
/// auto-POSTs signed responses back; never checks credentials — user
/// selection is a request parameter.
class MockIdp {
 public:
  explicit MockIdp(MockIdpOptions options);
  ~MockIdp();

  MockIdp(const MockIdp&) = delete;
  MockIdp& operator=(const MockIdp&) = delete;

  bool start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  int port() const { return port_; }
  std::string base_url() const;
  std::string sso_url() const { return base_url() + "/sso"; }

  const std::string& entity_id() const { return options_.entity_id; }
  const crypto::Certificate& certificate() const { return cert_; }
  std::string certificate_pem() const { return cert_.to_pem(); }
  const crypto::Certificate& foreign_certificate() const {
    return foreign_cert_;
  }
  const std::vector<IdpDirectoryEntry>& directory() const {
    return options_.directory;
  }
  const IdpDirectoryEntry* find_user(const std::string& email) const;

  struct IssuedResponse {
    std::string xml;
    std::string saml_response_b64;
    std::string acs_url;
    std::string relay_state;
  };

  /// Core issuance, also callable without HTTP: decodes the redirect-binding
  /// request and produces the signed (or deliberately faulted) response.
  Result<IssuedResponse, std::string> issue_for_request(
      const std::string& saml_request_b64, const std::string& relay_state,
      const std::string& user_email, FaultMode fault, UtcTime now) const;

  std::string build_response_xml(const IdpDirectoryEntry& user,
                                 const std::string& in_response_to,
                                 const std::string& acs_url,
                                 const std::string& audience, FaultMode fault,
                                 UtcTime now) const;

 private:
  MockIdpOptions options_;
  crypto::PrivateKey key_;
  crypto::Certificate cert_;
  crypto::PrivateKey foreign_key_;
  crypto::Certificate foreign_cert_;

  struct Http;
  std::unique_ptr<Http> http_;
  std::thread server_thread_;
  int port_ = 0;
  std::string host_;
};

/// Loads directory entries from a YAML fixture document.
Result<std::vector<IdpDirectoryEntry>, std::string> load_directory(
    const std::string& yaml_text);

}  // namespace authshim::mockidp

#endif  // AUTHSHIM_MOCK_IDP_HPP
