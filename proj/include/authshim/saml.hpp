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

#ifndef AUTHSHIM_SAML_HPP
#define AUTHSHIM_SAML_HPP

#include <chrono>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "authshim/clock.hpp"
#include "authshim/crypto.hpp"
#include "authshim/result.hpp"
#include "authshim/xml.hpp"

namespace authshim::saml {

inline constexpr std::string_view kProtocolNs =
    "urn:oasis:names:tc:SAML:2.0:protocol";
inline constexpr std::string_view kAssertionNs =
    "urn:oasis:names:tc:SAML:2.0:assertion";
inline constexpr std::string_view kDsigNs =
    "http://www.w3.org/2000/09/xmldsig#";
inline constexpr std::string_view kRsaSha256Uri =
    "http://www.w3.org/2001/04/xmldsig-more#rsa-sha256";
inline constexpr std::string_view kEmailNameIdFormat =
    "urn:oasis:names:tc:SAML:1.1:nameid-format:emailAddress";

/// Trackers expire five minutes after issuance; this also bounds how long a
/// login can sit on the IdP page before the response is rejected.
inline constexpr std::chrono::seconds kTrackerTtl{300};

enum class ErrorCode {
  RelayStateTooLong,
  XmlMalformed,
  DtdForbidden,
  DocumentTooLarge,
  StructureInvalid,
  SignatureMissing,
  SignatureInvalid,
  UntrustedCertificate,
  UnsupportedAlgorithm,
  AssertionExpired,
  AssertionNotYetValid,
  AudienceMismatch,
  DestinationMismatch,
  IssuerMismatch,
  InResponseToMismatch,
  TrackerMissing,
  TrackerExpired,
  ReplayDetected,
  MissingGroupsClaim,
  MissingSubject,
};

std::string_view to_string(ErrorCode code);

struct Error {
  ErrorCode code;
  std::string detail;
};

/// Shim-wide configuration. Loading and validation live in config.hpp;
/// everything here is immutable once the service starts.
struct ShimConfig {
  std::string sp_entity_id;
  std::string acs_url;
  std::string idp_sso_url;
  std::string idp_entity_id;
  crypto::Certificate idp_certificate;
  std::chrono::seconds clock_skew{90};
  std::chrono::seconds assertion_ttl_max{3600};
  std::string cookie_signing_key;  // exactly 32 bytes
  std::string session_cookie_name = "app_session";
  std::string shim_cookie_name = "shim_session";
  std::string tracker_cookie_name = "shim_tracker";
  std::string connector_base_url;
  std::string admin_token_env_name = "APP_ADMIN_TOKEN";
  std::string groups_attribute = "groups";
  std::chrono::seconds session_lifetime{8 * 3600};
  bool replay_cache_enabled = false;
};

struct AuthnRequestMessage {
  std::string request_id;  // "_" + 40 hex chars (160 random bits)
  UtcTime issue_instant;
  std::string destination;
  std::string redirect_url;
  std::string relay_state;
};

/// Stateless carrier for InResponseTo validation. Travels back to the shim
/// as an HMAC'd cookie; an invalid MAC is indistinguishable from absence.
struct RequestTracker {
  std::string request_id;
  UtcTime issued_at;
  std::string relay_state;

  bool expired(UtcTime now) const {
    return now > issued_at + kTrackerTtl;
  }
};

/// Validated identity facts pulled from a verified assertion. groups is
/// nullopt when the attribute is absent entirely (distinct from present but
/// empty; extract_user_info fails closed on both).
struct IdentityAssertion {
  std::string subject_email;
  std::optional<std::vector<std::string>> groups;
  std::optional<std::string> display_name;
  std::string audience;
  std::string in_response_to;
  UtcTime not_before;
  UtcTime not_on_or_after;
  std::string assertion_id;
  std::string issuer;
};

struct UserInfo {
  std::string email;
  std::vector<std::string> groups;  // order-preserving, deduplicated
  std::optional<std::string> display_name;
};

/// Parse result: the document plus located Response/Assertion elements.
struct ResponseDocument {
  xml::Document doc;
  const xml::Element* response = nullptr;
  const xml::Element* assertion = nullptr;
};

/// Output of verify_signature. The element tree is a reparse of the exact
/// canonical bytes the signature covered, so nothing outside the signed
/// region can reach validation or extraction. Constructible only through
/// verify_signature.
class VerifiedAssertion {
 public:
  const xml::Element& assertion() const { return *doc_.root; }
  const std::string& canonical_bytes() const { return canonical_; }
  const std::optional<std::string>& response_destination() const {
    return response_destination_;
  }
  const std::optional<std::string>& response_in_response_to() const {
    return response_in_response_to_;
  }

 private:
  friend Result<VerifiedAssertion, Error> verify_signature(
      const ResponseDocument& doc, const crypto::Certificate& idp_certificate);

  VerifiedAssertion() = default;

  xml::Document doc_;
  std::string canonical_;
  std::optional<std::string> response_destination_;
  std::optional<std::string> response_in_response_to_;
};

using Rng = std::function<crypto::Bytes(std::size_t)>;

Result<std::pair<AuthnRequestMessage, RequestTracker>, Error>
build_authn_request(const ShimConfig& config, const std::string& relay_state,
                    UtcTime now, const Rng& rng);

Result<ResponseDocument, Error> parse_response(std::string_view raw,
                                               const xml::ParserPolicy& policy);

Result<VerifiedAssertion, Error> verify_signature(
    const ResponseDocument& doc, const crypto::Certificate& idp_certificate);

Result<IdentityAssertion, Error> validate_conditions(
    const VerifiedAssertion& assertion, const ShimConfig& config,
    const std::optional<RequestTracker>& tracker, UtcTime now);

Result<UserInfo, Error> extract_user_info(const IdentityAssertion& assertion);

/// Pure time-window predicate used by validate_conditions:
/// not_before - skew <= now < not_on_or_after + skew.
bool within_validity_window(UtcTime not_before, UtcTime not_on_or_after,
                            UtcTime now, std::chrono::seconds skew);

/// Optional per-instance replay guard: a bounded TTL set of assertion IDs.
/// Best effort by design — single-use trackers remain the primary defense.
class ReplayCache {
 public:
  explicit ReplayCache(std::size_t capacity = 10000) : capacity_(capacity) {}

  /// Returns false when the id was already present (replay).
  bool insert(const std::string& assertion_id, UtcTime expires_at, UtcTime now);

 private:
  void evict(UtcTime now);

  std::mutex mu_;
  std::size_t capacity_;
  std::unordered_map<std::string, UtcTime> entries_;
  std::list<std::string> order_;  // insertion order for capacity eviction
};

}  // namespace authshim::saml

#endif  // AUTHSHIM_SAML_HPP
