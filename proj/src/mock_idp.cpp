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

#include "authshim/mock_idp.hpp"

#include <httplib.h>

#include <yaml-cpp/yaml.h>

#include <nlohmann/json.hpp>

#include "authshim/codec.hpp"
#include "authshim/saml.hpp"

namespace authshim::mockidp {

namespace {

using saml::kAssertionNs;
using saml::kDsigNs;
using saml::kProtocolNs;

std::string random_id() {
  return "_" + codec::hex_encode(crypto::random_bytes(20));
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::optional<FaultMode> parse_fault(std::string_view name) {
  if (name.empty() || name == "none") return FaultMode::None;
  if (name == "omit_groups") return FaultMode::OmitGroups;
  if (name == "empty_groups") return FaultMode::EmptyGroups;
  if (name == "expired") return FaultMode::Expired;
  if (name == "not_yet_valid") return FaultMode::NotYetValid;
  if (name == "bad_signature") return FaultMode::BadSignature;
  if (name == "wrong_audience") return FaultMode::WrongAudience;
  if (name == "wrong_issuer") return FaultMode::WrongIssuer;
  if (name == "unsolicited") return FaultMode::UnsolicitedResponse;
  if (name == "foreign_certificate") return FaultMode::ForeignCertificate;
  return std::nullopt;
}

std::string_view to_string(FaultMode mode) {
  switch (mode) {
    case FaultMode::None: return "none";
    case FaultMode::OmitGroups: return "omit_groups";
    case FaultMode::EmptyGroups: return "empty_groups";
    case FaultMode::Expired: return "expired";
    case FaultMode::NotYetValid: return "not_yet_valid";
    case FaultMode::BadSignature: return "bad_signature";
    case FaultMode::WrongAudience: return "wrong_audience";
    case FaultMode::WrongIssuer: return "wrong_issuer";
    case FaultMode::UnsolicitedResponse: return "unsolicited";
    case FaultMode::ForeignCertificate: return "foreign_certificate";
  }
  return "none";
}

void sign_assertion(xml::Element& assertion, const crypto::PrivateKey& key,
                    const crypto::Certificate& cert) {
  // Canonicalization excludes Signature elements, so signing before
  // insertion and verifying after are the same computation.
  const std::string canonical = xml::canonicalize(assertion);
  const auto sig = crypto::rsa_sha256_sign(key, canonical);

  auto signature = xml::make_element("ds", kDsigNs, "Signature");
  auto& signed_info =
      xml::add_child(*signature, xml::make_element("ds", kDsigNs,
                                                   "SignedInfo"));
  auto& method = xml::add_child(
      signed_info, xml::make_element("ds", kDsigNs, "SignatureMethod"));
  xml::add_attr(method, "Algorithm", saml::kRsaSha256Uri);
  auto& sig_value = xml::add_child(
      *signature, xml::make_element("ds", kDsigNs, "SignatureValue"));
  xml::add_text(sig_value, codec::base64_encode(sig));
  auto& key_info =
      xml::add_child(*signature, xml::make_element("ds", kDsigNs, "KeyInfo"));
  auto& x509_data =
      xml::add_child(key_info, xml::make_element("ds", kDsigNs, "X509Data"));
  auto& x509_cert = xml::add_child(
      x509_data, xml::make_element("ds", kDsigNs, "X509Certificate"));
  xml::add_text(x509_cert, codec::base64_encode(cert.der()));

  // Conventional placement: directly after the Issuer when present.
  xml::Node node;
  node.elem = std::move(signature);
  std::size_t insert_at = 0;
  for (std::size_t i = 0; i < assertion.children.size(); ++i) {
    const auto& c = assertion.children[i];
    if (c.is_element() && c.elem->name.is(kAssertionNs, "Issuer")) {
      insert_at = i + 1;
      break;
    }
  }
  assertion.children.insert(assertion.children.begin() + insert_at,
                            std::move(node));
}

struct MockIdp::Http {
  httplib::Server server;
};

MockIdp::MockIdp(MockIdpOptions options) : options_(std::move(options)) {
  if (options_.signing_key_pem) {
    auto loaded = crypto::PrivateKey::from_pem(*options_.signing_key_pem);
    if (loaded) key_ = std::move(*loaded);
  }
  if (!key_.valid()) key_ = crypto::PrivateKey::generate_rsa(2048);
  cert_ = crypto::Certificate::self_signed(key_, "mock-idp");
  foreign_key_ = crypto::PrivateKey::generate_rsa(2048);
  foreign_cert_ = crypto::Certificate::self_signed(foreign_key_, "rogue-idp");
}

MockIdp::~MockIdp() { stop(); }

const IdpDirectoryEntry* MockIdp::find_user(const std::string& email) const {
  for (const auto& entry : options_.directory) {
    if (entry.email == email) return &entry;
  }
  return nullptr;
}

std::string MockIdp::build_response_xml(const IdpDirectoryEntry& user,
                                        const std::string& in_response_to,
                                        const std::string& acs_url,
                                        const std::string& audience,
                                        FaultMode fault, UtcTime now) const {
  using std::chrono::minutes;
  using std::chrono::seconds;

  UtcTime not_before = now - seconds(30);
  UtcTime not_on_or_after = now + seconds(300);
  if (fault == FaultMode::Expired) {
    not_before = now - minutes(60);
    not_on_or_after = now - minutes(10);
  } else if (fault == FaultMode::NotYetValid) {
    not_before = now + minutes(10);
    not_on_or_after = now + minutes(60);
  }

  const std::string issuer_value = fault == FaultMode::WrongIssuer
                                       ? "urn:rogue-idp"
                                       : options_.entity_id;
  const std::string audience_value =
      fault == FaultMode::WrongAudience ? "urn:wrong-audience" : audience;
  const bool include_irt = fault != FaultMode::UnsolicitedResponse;

  auto response = xml::make_element("samlp", kProtocolNs, "Response");
  xml::add_attr(*response, "ID", random_id());
  xml::add_attr(*response, "Version", "2.0");
  xml::add_attr(*response, "IssueInstant", format_iso8601(now));
  xml::add_attr(*response, "Destination", acs_url);
  if (include_irt) xml::add_attr(*response, "InResponseTo", in_response_to);

  auto& response_issuer = xml::add_child(
      *response, xml::make_element("saml", kAssertionNs, "Issuer"));
  xml::add_text(response_issuer, issuer_value);

  auto& status = xml::add_child(
      *response, xml::make_element("samlp", kProtocolNs, "Status"));
  auto& status_code = xml::add_child(
      status, xml::make_element("samlp", kProtocolNs, "StatusCode"));
  xml::add_attr(status_code, "Value",
                "urn:oasis:names:tc:SAML:2.0:status:Success");

  auto assertion_ptr = xml::make_element("saml", kAssertionNs, "Assertion");
  xml::Element& assertion = *assertion_ptr;
  xml::add_attr(assertion, "ID", random_id());
  xml::add_attr(assertion, "Version", "2.0");
  xml::add_attr(assertion, "IssueInstant", format_iso8601(now));

  auto& assertion_issuer = xml::add_child(
      assertion, xml::make_element("saml", kAssertionNs, "Issuer"));
  xml::add_text(assertion_issuer, issuer_value);

  auto& subject = xml::add_child(
      assertion, xml::make_element("saml", kAssertionNs, "Subject"));
  auto& name_id =
      xml::add_child(subject, xml::make_element("saml", kAssertionNs,
                                                "NameID"));
  xml::add_attr(name_id, "Format", saml::kEmailNameIdFormat);
  xml::add_text(name_id, user.email);
  auto& confirmation = xml::add_child(
      subject, xml::make_element("saml", kAssertionNs, "SubjectConfirmation"));
  xml::add_attr(confirmation, "Method",
                "urn:oasis:names:tc:SAML:2.0:cm:bearer");
  auto& confirmation_data = xml::add_child(
      confirmation,
      xml::make_element("saml", kAssertionNs, "SubjectConfirmationData"));
  if (include_irt) {
    xml::add_attr(confirmation_data, "InResponseTo", in_response_to);
  }
  xml::add_attr(confirmation_data, "NotOnOrAfter",
                format_iso8601(not_on_or_after));
  xml::add_attr(confirmation_data, "Recipient", acs_url);

  auto& conditions = xml::add_child(
      assertion, xml::make_element("saml", kAssertionNs, "Conditions"));
  xml::add_attr(conditions, "NotBefore", format_iso8601(not_before));
  xml::add_attr(conditions, "NotOnOrAfter", format_iso8601(not_on_or_after));
  auto& restriction = xml::add_child(
      conditions,
      xml::make_element("saml", kAssertionNs, "AudienceRestriction"));
  auto& audience_elem = xml::add_child(
      restriction, xml::make_element("saml", kAssertionNs, "Audience"));
  xml::add_text(audience_elem, audience_value);

  auto& attr_statement = xml::add_child(
      assertion, xml::make_element("saml", kAssertionNs,
                                   "AttributeStatement"));
  if (!user.display_name.empty()) {
    auto& display = xml::add_child(
        attr_statement, xml::make_element("saml", kAssertionNs, "Attribute"));
    xml::add_attr(display, "Name", "displayName");
    auto& value = xml::add_child(
        display, xml::make_element("saml", kAssertionNs, "AttributeValue"));
    xml::add_text(value, user.display_name);
  }
  if (fault != FaultMode::OmitGroups) {
    auto& groups_attr = xml::add_child(
        attr_statement, xml::make_element("saml", kAssertionNs, "Attribute"));
    xml::add_attr(groups_attr, "Name", "groups");
    if (fault != FaultMode::EmptyGroups) {
      for (const auto& group : user.groups) {
        auto& value = xml::add_child(
            groups_attr,
            xml::make_element("saml", kAssertionNs, "AttributeValue"));
        xml::add_text(value, group);
      }
    }
  }

  const bool foreign = fault == FaultMode::ForeignCertificate;
  sign_assertion(assertion, foreign ? foreign_key_ : key_,
                 foreign ? foreign_cert_ : cert_);

  if (fault == FaultMode::BadSignature) {
    // Corrupt the signature value; canonical assertion bytes stay intact.
    for (auto& child : assertion.children) {
      if (child.is_element() && child.elem->name.local == "Signature") {
        auto* value = const_cast<xml::Element*>(
            child.elem->find_child(kDsigNs, "SignatureValue"));
        if (value && !value->children.empty()) {
          std::string& text = value->children.front().text;
          text[0] = text[0] == 'A' ? 'B' : 'A';
        }
      }
    }
  }

  xml::add_child(*response, std::move(assertion_ptr));
  return xml::serialize(*response);
}

Result<MockIdp::IssuedResponse, std::string> MockIdp::issue_for_request(
    const std::string& saml_request_b64, const std::string& relay_state,
    const std::string& user_email, FaultMode fault, UtcTime now) const {
  const auto deflated = codec::base64_decode(saml_request_b64);
  if (!deflated) return std::string("SAMLRequest is not valid base64");
  const auto request_xml = codec::inflate_raw(*deflated);
  if (!request_xml) return std::string("SAMLRequest failed to inflate");

  auto parsed = xml::parse(*request_xml, xml::ParserPolicy{});
  if (!parsed.ok()) {
    return std::string("SAMLRequest XML: ") + parsed.error().detail;
  }
  const xml::Element& request = *parsed.value().root;
  if (!request.name.is(kProtocolNs, "AuthnRequest")) {
    return std::string("expected an AuthnRequest");
  }
  const auto request_id = request.attr("ID").value_or("");
  const auto acs_url = request.attr("AssertionConsumerServiceURL").value_or("");
  const xml::Element* issuer = request.find_child(kAssertionNs, "Issuer");
  const std::string audience = issuer ? issuer->text() : "";
  if (request_id.empty() || acs_url.empty()) {
    return std::string("AuthnRequest missing ID or ACS URL");
  }

  const IdpDirectoryEntry* user = find_user(user_email);
  if (!user) return std::string("unknown user: " + user_email);

  IssuedResponse issued;
  issued.xml = build_response_xml(*user, request_id, acs_url, audience, fault,
                                  now);
  issued.saml_response_b64 = codec::base64_encode(issued.xml);
  issued.acs_url = acs_url;
  issued.relay_state = relay_state;
  return issued;
}

bool MockIdp::start(const std::string& host, int port) {
  http_ = std::make_unique<Http>();
  host_ = host;

  http_->server.Get("/sso", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    const std::string saml_request = req.get_param_value("SAMLRequest");
    const std::string relay_state = req.get_param_value("RelayState");
    const std::string user = req.has_param("user")
                                 ? req.get_param_value("user")
                                 : (options_.directory.empty()
                                        ? ""
                                        : options_.directory.front().email);
    const auto fault = parse_fault(req.get_param_value("fault"));
    if (!fault) {
      res.status = 400;
      res.set_content("unknown fault mode", "text/plain");
      return;
    }
    auto issued =
        issue_for_request(saml_request, relay_state, user, *fault, utc_now());
    if (!issued.ok()) {
      res.status = issued.error().rfind("unknown user", 0) == 0 ? 404 : 400;
      res.set_content(issued.error(), "text/plain");
      return;
    }
    std::string html =
        "<!DOCTYPE html><html><body onload=\"document.forms[0].submit()\">"
        "<form method=\"post\" action=\"" +
        html_escape(issued.value().acs_url) +
        "\"><input type=\"hidden\" name=\"SAMLResponse\" value=\"" +
        html_escape(issued.value().saml_response_b64) +
        "\"/><input type=\"hidden\" name=\"RelayState\" value=\"" +
        html_escape(issued.value().relay_state) +
        "\"/><noscript><input type=\"submit\" value=\"Continue\"/></noscript>"
        "</form></body></html>";
    res.set_content(html, "text/html");
  });

  http_->server.Get("/metadata", [this](const httplib::Request&,
                                        httplib::Response& res) {
    std::string doc = "entity_id: " + options_.entity_id +
                      "\nsso_url: " + sso_url() + "\ncertificate_pem: |\n";
    std::string pem = certificate_pem();
    std::size_t start = 0;
    while (start < pem.size()) {
      auto end = pem.find('\n', start);
      if (end == std::string::npos) end = pem.size();
      doc += "  " + pem.substr(start, end - start) + "\n";
      start = end + 1;
    }
    res.set_content(doc, "text/plain");
  });

  http_->server.Get("/directory", [this](const httplib::Request&,
                                         httplib::Response& res) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& entry : options_.directory) {
      out.push_back({{"email", entry.email},
                     {"display_name", entry.display_name},
                     {"groups", entry.groups}});
    }
    res.set_content(out.dump(), "application/json");
  });

  if (port == 0) {
    port_ = http_->server.bind_to_any_port(host.c_str());
    if (port_ <= 0) return false;
  } else {
    if (!http_->server.bind_to_port(host.c_str(), port)) return false;
    port_ = port;
  }
  server_thread_ = std::thread([this]() { http_->server.listen_after_bind(); });
  http_->server.wait_until_ready();
  return true;
}

void MockIdp::stop() {
  if (http_) http_->server.stop();
  if (server_thread_.joinable()) server_thread_.join();
  http_.reset();
}

std::string MockIdp::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

Result<std::vector<IdpDirectoryEntry>, std::string> load_directory(
    const std::string& yaml_text) {
  std::vector<IdpDirectoryEntry> out;
  try {
    YAML::Node root = YAML::Load(yaml_text);
    const YAML::Node users = root["users"].IsDefined() ? root["users"] : root;
    if (!users.IsSequence()) {
      return std::string("directory must be a sequence of users");
    }
    for (const auto& node : users) {
      IdpDirectoryEntry entry;
      entry.email = node["email"].as<std::string>("");
      entry.display_name = node["display_name"].as<std::string>("");
      if (node["groups"].IsDefined()) {
        for (const auto& g : node["groups"]) {
          entry.groups.push_back(g.as<std::string>());
        }
      }
      if (entry.email.empty()) {
        return std::string("directory entry without email");
      }
      for (const auto& existing : out) {
        if (existing.email == entry.email) {
          return std::string("duplicate directory email: " + entry.email);
        }
      }
      out.push_back(std::move(entry));
    }
  } catch (const YAML::Exception& e) {
    return std::string("directory YAML: ") + e.what();
  }
  return out;
}

}  // namespace authshim::mockidp
