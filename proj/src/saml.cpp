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

#include "authshim/saml.hpp"

#include <algorithm>
#include <unordered_set>

#include "authshim/codec.hpp"
#include "authshim/url.hpp"

namespace authshim::saml {

namespace {

constexpr std::size_t kMaxRelayStateBytes = 2048;

const xml::Element* find_signature(const xml::Element& assertion) {
  for (const auto& c : assertion.children) {
    if (c.is_element() && c.elem->name.local == "Signature") {
      return c.elem.get();
    }
  }
  return nullptr;
}

// Descends a strict element path; never crosses a Signature boundary.
const xml::Element* descend(const xml::Element* from,
                            std::initializer_list<std::string_view> path) {
  for (auto local : path) {
    if (!from) return nullptr;
    from = from->find_child(kAssertionNs, local);
  }
  return from;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RelayStateTooLong: return "RelayStateTooLong";
    case ErrorCode::XmlMalformed: return "XmlMalformed";
    case ErrorCode::DtdForbidden: return "DtdForbidden";
    case ErrorCode::DocumentTooLarge: return "DocumentTooLarge";
    case ErrorCode::StructureInvalid: return "StructureInvalid";
    case ErrorCode::SignatureMissing: return "SignatureMissing";
    case ErrorCode::SignatureInvalid: return "SignatureInvalid";
    case ErrorCode::UntrustedCertificate: return "UntrustedCertificate";
    case ErrorCode::UnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case ErrorCode::AssertionExpired: return "AssertionExpired";
    case ErrorCode::AssertionNotYetValid: return "AssertionNotYetValid";
    case ErrorCode::AudienceMismatch: return "AudienceMismatch";
    case ErrorCode::DestinationMismatch: return "DestinationMismatch";
    case ErrorCode::IssuerMismatch: return "IssuerMismatch";
    case ErrorCode::InResponseToMismatch: return "InResponseToMismatch";
    case ErrorCode::TrackerMissing: return "TrackerMissing";
    case ErrorCode::TrackerExpired: return "TrackerExpired";
    case ErrorCode::ReplayDetected: return "ReplayDetected";
    case ErrorCode::MissingGroupsClaim: return "MissingGroupsClaim";
    case ErrorCode::MissingSubject: return "MissingSubject";
  }
  return "UnknownError";
}

Result<std::pair<AuthnRequestMessage, RequestTracker>, Error>
build_authn_request(const ShimConfig& config, const std::string& relay_state,
                    UtcTime now, const Rng& rng) {
  if (relay_state.size() > kMaxRelayStateBytes) {
    return Error{ErrorCode::RelayStateTooLong,
                 "relay state exceeds " + std::to_string(kMaxRelayStateBytes) +
                     " bytes"};
  }

  const std::string request_id = "_" + codec::hex_encode(rng(20));

  auto request = xml::make_element("samlp", kProtocolNs, "AuthnRequest");
  xml::add_attr(*request, "ID", request_id);
  xml::add_attr(*request, "Version", "2.0");
  xml::add_attr(*request, "IssueInstant", format_iso8601(now));
  xml::add_attr(*request, "Destination", config.idp_sso_url);
  xml::add_attr(*request, "AssertionConsumerServiceURL", config.acs_url);
  xml::add_attr(*request, "ProtocolBinding",
                "urn:oasis:names:tc:SAML:2.0:bindings:HTTP-POST");
  auto& issuer =
      xml::add_child(*request, xml::make_element("saml", kAssertionNs,
                                                 "Issuer"));
  xml::add_text(issuer, config.sp_entity_id);

  const std::string document = xml::serialize(*request);
  const std::string encoded =
      codec::base64_encode(codec::deflate_raw(document));

  std::string redirect_url =
      append_query_param(config.idp_sso_url, "SAMLRequest", encoded);
  redirect_url = append_query_param(redirect_url, "RelayState", relay_state);

  AuthnRequestMessage message;
  message.request_id = request_id;
  message.issue_instant = now;
  message.destination = config.idp_sso_url;
  message.redirect_url = std::move(redirect_url);
  message.relay_state = relay_state;

  RequestTracker tracker;
  tracker.request_id = request_id;
  tracker.issued_at = now;
  tracker.relay_state = relay_state;

  return std::make_pair(std::move(message), std::move(tracker));
}

Result<ResponseDocument, Error> parse_response(
    std::string_view raw, const xml::ParserPolicy& policy) {
  auto parsed = xml::parse(raw, policy);
  if (!parsed.ok()) {
    switch (parsed.error().kind) {
      case xml::ErrorKind::DtdForbidden:
        return Error{ErrorCode::DtdForbidden, parsed.error().detail};
      case xml::ErrorKind::TooLarge:
        return Error{ErrorCode::DocumentTooLarge, parsed.error().detail};
      case xml::ErrorKind::Malformed:
        return Error{ErrorCode::XmlMalformed, parsed.error().detail};
    }
  }

  ResponseDocument doc;
  doc.doc = parsed.take();
  if (!doc.doc.root->name.is(kProtocolNs, "Response")) {
    return Error{ErrorCode::StructureInvalid, "root element is not a Response"};
  }
  doc.response = doc.doc.root.get();

  const auto assertions = doc.response->find_children(kAssertionNs,
                                                      "Assertion");
  const auto encrypted =
      doc.response->find_children(kAssertionNs, "EncryptedAssertion");
  if (!encrypted.empty()) {
    return Error{ErrorCode::StructureInvalid,
                 "encrypted assertions are not supported"};
  }
  if (assertions.size() != 1) {
    return Error{ErrorCode::StructureInvalid,
                 "expected exactly one assertion, found " +
                     std::to_string(assertions.size())};
  }
  doc.assertion = assertions.front();
  return doc;
}

Result<VerifiedAssertion, Error> verify_signature(
    const ResponseDocument& doc, const crypto::Certificate& idp_certificate) {
  const xml::Element* signature = find_signature(*doc.assertion);
  if (!signature) {
    return Error{ErrorCode::SignatureMissing, "assertion carries no signature"};
  }

  const xml::Element* signed_info = signature->find_child(kDsigNs,
                                                          "SignedInfo");
  const xml::Element* method =
      signed_info ? signed_info->find_child(kDsigNs, "SignatureMethod")
                  : nullptr;
  const auto algorithm = method ? method->attr("Algorithm") : std::nullopt;
  if (!algorithm || *algorithm != kRsaSha256Uri) {
    return Error{ErrorCode::UnsupportedAlgorithm,
                 algorithm ? "algorithm not permitted: " + *algorithm
                           : "signature method missing"};
  }

  const xml::Element* key_info = signature->find_child(kDsigNs, "KeyInfo");
  const xml::Element* x509_data =
      key_info ? key_info->find_child(kDsigNs, "X509Data") : nullptr;
  const xml::Element* x509_cert =
      x509_data ? x509_data->find_child(kDsigNs, "X509Certificate") : nullptr;
  if (!x509_cert) {
    return Error{ErrorCode::UntrustedCertificate, "no certificate embedded"};
  }
  const auto cert_der = codec::base64_decode(x509_cert->text());
  if (!cert_der) {
    return Error{ErrorCode::UntrustedCertificate,
                 "embedded certificate is not valid base64"};
  }
  // Trust is byte-equality with the configured IdP certificate.
  if (*cert_der != idp_certificate.der()) {
    return Error{ErrorCode::UntrustedCertificate,
                 "embedded certificate does not match the configured IdP"};
  }

  const xml::Element* sig_value = signature->find_child(kDsigNs,
                                                        "SignatureValue");
  const auto sig_bytes =
      sig_value ? codec::base64_decode(sig_value->text()) : std::nullopt;
  if (!sig_bytes) {
    return Error{ErrorCode::SignatureInvalid, "signature value unreadable"};
  }

  const std::string canonical = xml::canonicalize(*doc.assertion);
  if (!crypto::rsa_sha256_verify(idp_certificate, canonical, *sig_bytes)) {
    return Error{ErrorCode::SignatureInvalid,
                 "signature does not match assertion content"};
  }

  // Reparse the canonical bytes: downstream consumers see exactly the
  // signed content and nothing else.
  auto reparsed = xml::parse(canonical, xml::ParserPolicy{});
  if (!reparsed.ok()) {
    return Error{ErrorCode::StructureInvalid,
                 "canonical assertion failed to reparse"};
  }

  VerifiedAssertion verified;
  verified.doc_ = reparsed.take();
  verified.canonical_ = canonical;
  verified.response_destination_ = doc.response->attr("Destination");
  verified.response_in_response_to_ = doc.response->attr("InResponseTo");
  return verified;
}

bool within_validity_window(UtcTime not_before, UtcTime not_on_or_after,
                            UtcTime now, std::chrono::seconds skew) {
  return not_before - skew <= now && now < not_on_or_after + skew;
}

Result<IdentityAssertion, Error> validate_conditions(
    const VerifiedAssertion& verified, const ShimConfig& config,
    const std::optional<RequestTracker>& tracker, UtcTime now) {
  const xml::Element& assertion = verified.assertion();

  const xml::Element* conditions =
      assertion.find_child(kAssertionNs, "Conditions");
  if (!conditions) {
    return Error{ErrorCode::StructureInvalid, "assertion has no Conditions"};
  }
  const auto nb_attr = conditions->attr("NotBefore");
  const auto noa_attr = conditions->attr("NotOnOrAfter");
  const auto not_before = nb_attr ? parse_iso8601(*nb_attr) : std::nullopt;
  const auto not_on_or_after =
      noa_attr ? parse_iso8601(*noa_attr) : std::nullopt;
  if (!not_before || !not_on_or_after || !(*not_before < *not_on_or_after)) {
    return Error{ErrorCode::StructureInvalid,
                 "conditions validity window unreadable"};
  }

  // Over-long windows are clamped: an assertion may never outlive
  // not_before + assertion_ttl_max.
  UtcTime effective_end = *not_on_or_after;
  if (config.assertion_ttl_max.count() > 0) {
    effective_end = std::min(effective_end,
                             *not_before + config.assertion_ttl_max);
  }
  if (now < *not_before - config.clock_skew) {
    return Error{ErrorCode::AssertionNotYetValid,
                 "assertion not valid until " + format_iso8601(*not_before)};
  }
  if (!within_validity_window(*not_before, effective_end, now,
                              config.clock_skew)) {
    return Error{ErrorCode::AssertionExpired,
                 "assertion expired at " + format_iso8601(effective_end)};
  }

  const xml::Element* audience =
      descend(conditions, {"AudienceRestriction", "Audience"});
  if (!audience || audience->text() != config.sp_entity_id) {
    return Error{ErrorCode::AudienceMismatch,
                 audience ? "audience is " + audience->text()
                          : "no audience restriction present"};
  }

  if (verified.response_destination() &&
      *verified.response_destination() != config.acs_url) {
    return Error{ErrorCode::DestinationMismatch,
                 "destination is " + *verified.response_destination()};
  }

  const xml::Element* issuer = assertion.find_child(kAssertionNs, "Issuer");
  if (!issuer || issuer->text() != config.idp_entity_id) {
    return Error{ErrorCode::IssuerMismatch,
                 issuer ? "issuer is " + issuer->text() : "no issuer present"};
  }

  // InResponseTo: prefer the signed SubjectConfirmationData copy; the
  // response-level attribute is outside the signature.
  std::string in_response_to;
  const xml::Element* confirmation_data = descend(
      &assertion, {"Subject", "SubjectConfirmation", "SubjectConfirmationData"});
  if (confirmation_data) {
    in_response_to = confirmation_data->attr("InResponseTo").value_or("");
  }
  if (in_response_to.empty() && verified.response_in_response_to()) {
    in_response_to = *verified.response_in_response_to();
  }

  if (!tracker.has_value()) {
    return Error{ErrorCode::TrackerMissing,
                 "no request tracker accompanies this response"};
  }
  if (tracker->expired(now)) {
    return Error{ErrorCode::TrackerExpired, "request tracker expired"};
  }
  if (in_response_to != tracker->request_id) {
    return Error{ErrorCode::InResponseToMismatch,
                 in_response_to.empty()
                     ? "response carries no InResponseTo"
                     : "InResponseTo does not match the pending request"};
  }

  IdentityAssertion identity;
  identity.audience = audience->text();
  identity.in_response_to = in_response_to;
  identity.not_before = *not_before;
  identity.not_on_or_after = *not_on_or_after;
  identity.assertion_id = assertion.attr("ID").value_or("");
  identity.issuer = issuer->text();

  const xml::Element* name_id = descend(&assertion, {"Subject", "NameID"});
  if (name_id) identity.subject_email = name_id->text();

  const xml::Element* attr_statement =
      assertion.find_child(kAssertionNs, "AttributeStatement");
  if (attr_statement) {
    for (const auto* attribute :
         attr_statement->find_children(kAssertionNs, "Attribute")) {
      const auto name = attribute->attr("Name").value_or("");
      std::vector<std::string> values;
      for (const auto* value :
           attribute->find_children(kAssertionNs, "AttributeValue")) {
        values.push_back(value->text());
      }
      if (name == config.groups_attribute) {
        identity.groups = std::move(values);
      } else if (name == "displayName" && !values.empty()) {
        identity.display_name = values.front();
      }
    }
  }
  return identity;
}

Result<UserInfo, Error> extract_user_info(const IdentityAssertion& assertion) {
  if (assertion.subject_email.empty()) {
    return Error{ErrorCode::MissingSubject, "assertion subject has no NameID"};
  }
  if (!assertion.groups.has_value()) {
    return Error{ErrorCode::MissingGroupsClaim, "groups attribute absent"};
  }
  if (assertion.groups->empty()) {
    return Error{ErrorCode::MissingGroupsClaim,
                 "groups attribute has no values"};
  }

  UserInfo info;
  info.email = assertion.subject_email;
  info.display_name = assertion.display_name;
  std::unordered_set<std::string> seen;
  for (const auto& group : *assertion.groups) {
    if (seen.insert(group).second) info.groups.push_back(group);
  }
  return info;
}

bool ReplayCache::insert(const std::string& assertion_id, UtcTime expires_at,
                         UtcTime now) {
  std::lock_guard<std::mutex> lock(mu_);
  evict(now);
  auto it = entries_.find(assertion_id);
  if (it != entries_.end() && now < it->second) return false;
  if (it == entries_.end() && entries_.size() >= capacity_ &&
      !order_.empty()) {
    entries_.erase(order_.front());
    order_.pop_front();
  }
  if (it == entries_.end()) {
    order_.push_back(assertion_id);
    entries_[assertion_id] = expires_at;
  } else {
    it->second = expires_at;
  }
  return true;
}

void ReplayCache::evict(UtcTime now) {
  while (!order_.empty()) {
    auto it = entries_.find(order_.front());
    if (it != entries_.end() && now < it->second) break;
    if (it != entries_.end()) entries_.erase(it);
    order_.pop_front();
  }
}

}  // namespace authshim::saml
