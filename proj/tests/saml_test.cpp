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

#include <doctest.h>

#include <cctype>
#include <random>
#include <set>

#include "authshim/codec.hpp"
#include "authshim/mock_idp.hpp"
#include "authshim/saml.hpp"
#include "authshim/url.hpp"
#include "tamper.hpp"

using namespace authshim;
using saml::ErrorCode;

namespace {

const UtcTime kNow = utc_from_unix(1767225600);  // 2026-01-01T00:00:00Z

saml::Rng test_rng() {
  auto state = std::make_shared<std::mt19937>(42);
  return [state](std::size_t n) {
    codec::Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>((*state)());
    return out;
  };
}

struct Fixture {
  mockidp::MockIdp idp;
  saml::ShimConfig config;

  Fixture()
      : idp(mockidp::MockIdpOptions{
            "urn:mock-idp",
            {{"admin@example.com",
              "Admin Example",
              {"BI-TOOL-ADMINS", "BI-TOOL-USERS"}}},
            std::nullopt}) {
    config.sp_entity_id = "urn:authshim";
    config.acs_url = "http://127.0.0.1:7000/saml/acs";
    config.idp_sso_url = "http://127.0.0.1:7001/sso";
    config.idp_entity_id = idp.entity_id();
    config.idp_certificate = idp.certificate();
    config.cookie_signing_key = std::string(32, 'k');
  }

  // Runs the redirect binding up to an issued response.
  struct Issued {
    saml::RequestTracker tracker;
    std::string response_xml;
  };

  Issued issue(mockidp::FaultMode fault = mockidp::FaultMode::None,
               UtcTime now = kNow) {
    auto built = saml::build_authn_request(config, "/", now, test_rng());
    REQUIRE(built.ok());
    auto [message, tracker] = built.take();
    const std::string b64 = extract_saml_request_param(message.redirect_url);
    auto issued = idp.issue_for_request(b64, message.relay_state,
                                        "admin@example.com", fault, now);
    const std::string why = issued.ok() ? std::string() : issued.error();
    REQUIRE_MESSAGE(issued.ok(), why);
    return Issued{tracker, issued.value().xml};
  }

  // Pipeline helper: parse -> verify -> validate.
  Result<saml::IdentityAssertion, saml::Error> run_pipeline(
      const std::string& response_xml,
      const std::optional<saml::RequestTracker>& tracker,
      UtcTime now = kNow) {
    auto doc = saml::parse_response(response_xml, xml::ParserPolicy{});
    if (!doc.ok()) return doc.take_error();
    auto verified = saml::verify_signature(doc.value(),
                                           config.idp_certificate);
    if (!verified.ok()) return verified.take_error();
    return saml::validate_conditions(verified.value(), config, tracker, now);
  }

  static std::string extract_saml_request_param(const std::string& url) {
    const auto pos = url.find("SAMLRequest=");
    REQUIRE(pos != std::string::npos);
    auto end = url.find('&', pos);
    if (end == std::string::npos) end = url.size();
    const std::string encoded =
        url.substr(pos + 12, end - pos - 12);
    auto decoded = codec::url_decode(encoded);
    REQUIRE(decoded.has_value());
    return *decoded;
  }
};

}  // namespace

TEST_CASE("build_authn_request carries relay state and unique ids") {
  Fixture fx;
  auto a = saml::build_authn_request(fx.config, "/dashboards/7", kNow,
                                     test_rng());
  REQUIRE(a.ok());
  CHECK(a.value().second.relay_state == "/dashboards/7");

  auto redirect = parse_url(a.value().first.redirect_url);
  REQUIRE(redirect.has_value());
  auto sso = parse_url(fx.config.idp_sso_url);
  REQUIRE(sso.has_value());
  CHECK(redirect->host == sso->host);

  auto b = saml::build_authn_request(fx.config, "/dashboards/7", kNow,
                                     test_rng());
  auto c = saml::build_authn_request(
      fx.config, "/dashboards/7", kNow, [](std::size_t n) {
        return crypto::random_bytes(n);
      });
  REQUIRE(b.ok());
  REQUIRE(c.ok());
  CHECK(b.value().first.request_id != c.value().first.request_id);
  CHECK(b.value().first.request_id ==
        b.value().second.request_id);  // tracker matches message
}

TEST_CASE("build_authn_request round-trip decode oracle") {
  // Independent decode path: URL parameter -> base64 -> raw inflate -> XML.
  Fixture fx;
  auto built = saml::build_authn_request(fx.config, "/x", kNow, test_rng());
  REQUIRE(built.ok());
  const std::string b64 =
      Fixture::extract_saml_request_param(built.value().first.redirect_url);
  auto deflated = codec::base64_decode(b64);
  REQUIRE(deflated.has_value());
  auto request_xml = codec::inflate_raw(*deflated);
  REQUIRE(request_xml.has_value());

  auto doc = xml::parse(*request_xml, xml::ParserPolicy{});
  REQUIRE(doc.ok());
  const xml::Element& request = *doc.value().root;
  CHECK(request.name.is(saml::kProtocolNs, "AuthnRequest"));
  CHECK(request.attr("ID") == built.value().first.request_id);
  CHECK(request.attr("AssertionConsumerServiceURL") == fx.config.acs_url);
  const auto* issuer = request.find_child(saml::kAssertionNs, "Issuer");
  REQUIRE(issuer != nullptr);
  CHECK(issuer->text() == fx.config.sp_entity_id);
}

TEST_CASE("build_authn_request rejects oversized relay state") {
  Fixture fx;
  auto r = saml::build_authn_request(fx.config, std::string(2049, 'a'), kNow,
                                     test_rng());
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().code == ErrorCode::RelayStateTooLong);

  auto ok = saml::build_authn_request(fx.config, std::string(2048, 'a'), kNow,
                                      test_rng());
  CHECK(ok.ok());
}

TEST_CASE("parse_response accepts the mock response and enforces structure") {
  Fixture fx;
  auto issued = fx.issue();
  auto doc = saml::parse_response(issued.response_xml, xml::ParserPolicy{});
  REQUIRE(doc.ok());
  CHECK(doc.value().assertion != nullptr);

  SUBCASE("DOCTYPE prefix is DtdForbidden") {
    auto r = saml::parse_response("<!DOCTYPE foo [" + issued.response_xml,
                                  xml::ParserPolicy{});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::DtdForbidden);
  }
  SUBCASE("oversized document") {
    std::string big = issued.response_xml;
    big.insert(big.find("<saml:Assertion"), "");
    big += std::string(2 * 1024 * 1024, ' ');
    auto r = saml::parse_response(big, xml::ParserPolicy{});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::DocumentTooLarge);
  }
  SUBCASE("zero assertions") {
    auto r = saml::parse_response(
        "<samlp:Response xmlns:samlp=\"urn:oasis:names:tc:SAML:2.0:protocol\">"
        "</samlp:Response>",
        xml::ParserPolicy{});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::StructureInvalid);
  }
  SUBCASE("two assertions") {
    std::string two = issued.response_xml;
    const auto begin = two.find("<saml:Assertion");
    const auto end = two.find("</saml:Assertion>") + 17;
    two.insert(end, two.substr(begin, end - begin));
    auto r = saml::parse_response(two, xml::ParserPolicy{});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::StructureInvalid);
  }
  SUBCASE("not XML at all") {
    auto r = saml::parse_response("{}", xml::ParserPolicy{});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::XmlMalformed);
  }
}

TEST_CASE("verify_signature accepts authentic responses") {
  Fixture fx;
  auto issued = fx.issue();
  auto doc = saml::parse_response(issued.response_xml, xml::ParserPolicy{});
  REQUIRE(doc.ok());
  auto verified = saml::verify_signature(doc.value(), fx.config.idp_certificate);
  REQUIRE(verified.ok());
  // The verified view contains exactly the signed bytes.
  CHECK(verified.value().canonical_bytes().find("Signature") ==
        std::string::npos);
}

TEST_CASE("tamper soundness: 120 random single-byte mutations rejected") {
  Fixture fx;
  auto issued = fx.issue();
  const auto positions =
      testsupport::signed_content_positions(issued.response_xml);
  REQUIRE(positions.size() > 50);

  std::mt19937 rng(99);
  int rejected_as_invalid = 0;
  const int trials = 120;
  for (int i = 0; i < trials; ++i) {
    const std::size_t pos = positions[rng() % positions.size()];
    const std::string mutated =
        testsupport::mutate_at(issued.response_xml, pos, rng);

    auto doc = saml::parse_response(mutated, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto verified = saml::verify_signature(doc.value(),
                                           fx.config.idp_certificate);
    REQUIRE_FALSE(verified.ok());
    if (verified.error().code == ErrorCode::SignatureInvalid) {
      ++rejected_as_invalid;
    }
  }
  CHECK(rejected_as_invalid == trials);
}

TEST_CASE("tamper soundness: arbitrary mutations anywhere never verify") {
  // Stronger net: flip any byte in the assertion region to any value;
  // whatever stage rejects it, the pipeline must never produce a verified
  // identity whose canonical bytes differ from the signed original.
  Fixture fx;
  auto issued = fx.issue();
  const auto region = testsupport::locate_assertion(issued.response_xml);
  REQUIRE(region.found);

  const std::string original_canonical = [&] {
    auto doc = saml::parse_response(issued.response_xml, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto verified =
        saml::verify_signature(doc.value(), fx.config.idp_certificate);
    REQUIRE(verified.ok());
    return verified.value().canonical_bytes();
  }();

  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string mutated = issued.response_xml;
    const std::size_t pos =
        region.begin + rng() % (region.end - region.begin);
    char replacement;
    do {
      replacement = static_cast<char>(rng() % 94 + 33);
    } while (replacement == mutated[pos]);
    mutated[pos] = replacement;

    auto doc = saml::parse_response(mutated, xml::ParserPolicy{});
    if (!doc.ok()) continue;  // rejected earlier: fine, still closed
    auto verified = saml::verify_signature(doc.value(),
                                           fx.config.idp_certificate);
    if (!verified.ok()) continue;
    // Only acceptable contentless mutations live in the excluded Signature
    // envelope; the verified content must equal the originally signed bytes.
    CHECK(verified.value().canonical_bytes() == original_canonical);
  }
}

TEST_CASE("verify_signature error taxonomy") {
  Fixture fx;
  auto issued = fx.issue();

  SUBCASE("foreign certificate is untrusted") {
    auto foreign = fx.issue(mockidp::FaultMode::ForeignCertificate);
    auto doc = saml::parse_response(foreign.response_xml, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto r = saml::verify_signature(doc.value(), fx.config.idp_certificate);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::UntrustedCertificate);
  }
  SUBCASE("corrupted signature value") {
    auto bad = fx.issue(mockidp::FaultMode::BadSignature);
    auto doc = saml::parse_response(bad.response_xml, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto r = saml::verify_signature(doc.value(), fx.config.idp_certificate);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::SignatureInvalid);
  }
  SUBCASE("missing signature") {
    std::string stripped = issued.response_xml;
    const auto begin = stripped.find("<ds:Signature");
    const auto end = stripped.find("</ds:Signature>") + 15;
    stripped.erase(begin, end - begin);
    auto doc = saml::parse_response(stripped, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto r = saml::verify_signature(doc.value(), fx.config.idp_certificate);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::SignatureMissing);
  }
  SUBCASE("unsupported algorithm") {
    std::string swapped = issued.response_xml;
    const std::string rsa256(saml::kRsaSha256Uri);
    const auto pos = swapped.find(rsa256);
    REQUIRE(pos != std::string::npos);
    swapped.replace(pos, rsa256.size(),
                    "http://www.w3.org/2000/09/xmldsig#rsa-sha1");
    auto doc = saml::parse_response(swapped, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto r = saml::verify_signature(doc.value(), fx.config.idp_certificate);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::UnsupportedAlgorithm);
  }
}

TEST_CASE("validate_conditions rejects the documented failure modes") {
  Fixture fx;

  SUBCASE("expired assertion") {
    auto issued = fx.issue(mockidp::FaultMode::Expired);
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::AssertionExpired);
  }
  SUBCASE("not-yet-valid assertion") {
    auto issued = fx.issue(mockidp::FaultMode::NotYetValid);
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::AssertionNotYetValid);
  }
  SUBCASE("audience mismatch") {
    auto issued = fx.issue(mockidp::FaultMode::WrongAudience);
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::AudienceMismatch);
  }
  SUBCASE("issuer mismatch") {
    auto issued = fx.issue(mockidp::FaultMode::WrongIssuer);
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::IssuerMismatch);
  }
  SUBCASE("tracker missing: unsolicited responses rejected") {
    auto issued = fx.issue();
    auto r = fx.run_pipeline(issued.response_xml, std::nullopt);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::TrackerMissing);
  }
  SUBCASE("tracker expired") {
    auto issued = fx.issue();
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker,
                             kNow + std::chrono::seconds(301));
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::TrackerExpired);
  }
  SUBCASE("InResponseTo mismatch against a different tracker") {
    auto issued = fx.issue();
    saml::RequestTracker other = issued.tracker;
    other.request_id = "_0000000000000000000000000000000000000000";
    auto r = fx.run_pipeline(issued.response_xml, other);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::InResponseToMismatch);
  }
  SUBCASE("response without InResponseTo while a tracker is pending") {
    auto issued = fx.issue(mockidp::FaultMode::UnsolicitedResponse);
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::InResponseToMismatch);
  }
  SUBCASE("destination mismatch") {
    auto issued = fx.issue();
    auto altered = fx.config;
    altered.acs_url = "http://127.0.0.1:7000/other/acs";
    auto doc = saml::parse_response(issued.response_xml, xml::ParserPolicy{});
    REQUIRE(doc.ok());
    auto verified = saml::verify_signature(doc.value(),
                                           fx.config.idp_certificate);
    REQUIRE(verified.ok());
    auto r = saml::validate_conditions(verified.value(), altered,
                                       issued.tracker, kNow);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::DestinationMismatch);
  }
  SUBCASE("happy path yields a full identity") {
    auto issued = fx.issue();
    auto r = fx.run_pipeline(issued.response_xml, issued.tracker);
    REQUIRE(r.ok());
    CHECK(r.value().subject_email == "admin@example.com");
    REQUIRE(r.value().groups.has_value());
    CHECK(r.value().groups->size() == 2);
    CHECK(r.value().issuer == fx.config.idp_entity_id);
    CHECK(r.value().in_response_to == issued.tracker.request_id);
  }
}

TEST_CASE("time-window acceptance matches the formula exhaustively") {
  // Oracle: acceptance <=> not_before - skew <= now < not_on_or_after + skew.
  // The predicate under test is exactly the one validate_conditions applies;
  // the boundary test below ties it to really signed assertions.
  const std::int64_t base = unix_seconds(kNow);
  for (int skew_s : {0, 1, 2, 90}) {
    for (int nb_off = 0; nb_off < 4; ++nb_off) {
      for (int len = 1; len <= 4; ++len) {
        const std::int64_t nb = base + nb_off;
        const std::int64_t noa = base + nb_off + len;
        for (std::int64_t now_s = nb - skew_s - 3; now_s <= noa + skew_s + 3;
             ++now_s) {
          const bool expected = (nb - skew_s <= now_s) && (now_s < noa + skew_s);
          CAPTURE(skew_s);
          CAPTURE(nb_off);
          CAPTURE(len);
          CAPTURE(now_s - base);
          CHECK(saml::within_validity_window(
                    utc_from_unix(nb), utc_from_unix(noa), utc_from_unix(now_s),
                    std::chrono::seconds(skew_s)) == expected);
        }
      }
    }
  }
}

TEST_CASE("validate_conditions honors the window at exact boundaries") {
  // End-to-end boundary agreement on really signed assertions: the mock
  // issues [t-30s, t+300s]; probe each edge with skew 0 and 90.
  Fixture fx;
  fx.config.assertion_ttl_max = std::chrono::seconds(1 << 20);
  auto issued = fx.issue();  // window [kNow-30, kNow+300]
  const std::int64_t nb = unix_seconds(kNow) - 30;
  const std::int64_t noa = unix_seconds(kNow) + 300;

  for (int skew_s : {0, 90}) {
    fx.config.clock_skew = std::chrono::seconds(skew_s);
    struct Probe {
      std::int64_t now;
      bool accept;
    } probes[] = {
        {nb - skew_s - 1, false}, {nb - skew_s, true},
        {noa + skew_s - 1, true}, {noa + skew_s, false},
    };
    for (const auto& probe : probes) {
      // Keep the tracker fresh relative to the probed time.
      saml::RequestTracker tracker = issued.tracker;
      tracker.issued_at = utc_from_unix(probe.now);
      auto r = fx.run_pipeline(issued.response_xml, tracker,
                               utc_from_unix(probe.now));
      CAPTURE(skew_s);
      CAPTURE(probe.now - nb);
      CHECK(r.ok() == probe.accept);
      if (!r.ok()) {
        CHECK((r.error().code == ErrorCode::AssertionExpired ||
               r.error().code == ErrorCode::AssertionNotYetValid));
      }
    }
  }
}

TEST_CASE("assertion_ttl_max clamps over-long windows") {
  Fixture fx;
  fx.config.assertion_ttl_max = std::chrono::seconds(60);
  fx.config.clock_skew = std::chrono::seconds(0);
  auto issued = fx.issue();  // window [kNow-30, kNow+300], longer than 60s
  // Effective expiry is nb+60 = kNow+30.
  saml::RequestTracker tracker = issued.tracker;
  auto ok = fx.run_pipeline(issued.response_xml, tracker,
                            kNow + std::chrono::seconds(29));
  CHECK(ok.ok());
  tracker.issued_at = kNow + std::chrono::seconds(31);
  auto expired = fx.run_pipeline(issued.response_xml, tracker,
                                 kNow + std::chrono::seconds(31));
  REQUIRE_FALSE(expired.ok());
  CHECK(expired.error().code == ErrorCode::AssertionExpired);
}

TEST_CASE("extract_user_info fail-closed contract") {
  saml::IdentityAssertion ia;
  ia.subject_email = "user@example.com";

  SUBCASE("groups absent") {
    auto r = saml::extract_user_info(ia);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::MissingGroupsClaim);
    CHECK(r.error().detail == "groups attribute absent");
  }
  SUBCASE("groups empty") {
    ia.groups = std::vector<std::string>{};
    auto r = saml::extract_user_info(ia);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::MissingGroupsClaim);
    CHECK(r.error().detail == "groups attribute has no values");
  }
  SUBCASE("missing subject") {
    ia.subject_email.clear();
    ia.groups = std::vector<std::string>{"A"};
    auto r = saml::extract_user_info(ia);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::MissingSubject);
  }
  SUBCASE("duplicates removed, order preserved") {
    ia.groups = std::vector<std::string>{"A", "A", "B"};
    auto r = saml::extract_user_info(ia);
    REQUIRE(r.ok());
    CHECK(r.value().groups == std::vector<std::string>{"A", "B"});
  }
  SUBCASE("pass-through of the paper-shaped group names") {
    ia.groups = std::vector<std::string>{"BI-TOOL-ADMINS", "BI-TOOL-USERS"};
    auto r = saml::extract_user_info(ia);
    REQUIRE(r.ok());
    CHECK(r.value().groups ==
          std::vector<std::string>{"BI-TOOL-ADMINS", "BI-TOOL-USERS"});
  }
}

TEST_CASE("fault modes map to distinct pipeline rejections") {
  Fixture fx;
  using mockidp::FaultMode;
  struct Expectation {
    FaultMode fault;
    ErrorCode code;
    std::string detail_contains;
  } cases[] = {
      {FaultMode::Expired, ErrorCode::AssertionExpired, ""},
      {FaultMode::NotYetValid, ErrorCode::AssertionNotYetValid, ""},
      {FaultMode::BadSignature, ErrorCode::SignatureInvalid, ""},
      {FaultMode::WrongAudience, ErrorCode::AudienceMismatch, ""},
      {FaultMode::WrongIssuer, ErrorCode::IssuerMismatch, ""},
      {FaultMode::UnsolicitedResponse, ErrorCode::InResponseToMismatch,
       "no InResponseTo"},
      {FaultMode::ForeignCertificate, ErrorCode::UntrustedCertificate, ""},
      {FaultMode::OmitGroups, ErrorCode::MissingGroupsClaim, "absent"},
      {FaultMode::EmptyGroups, ErrorCode::MissingGroupsClaim, "no values"},
  };
  std::set<std::pair<ErrorCode, std::string>> seen;
  for (const auto& c : cases) {
    auto issued = fx.issue(c.fault);
    auto validated = fx.run_pipeline(issued.response_xml, issued.tracker);
    saml::Error error{ErrorCode::MissingSubject, ""};
    if (validated.ok()) {
      auto extracted = saml::extract_user_info(validated.value());
      REQUIRE_FALSE(extracted.ok());
      error = extracted.take_error();
    } else {
      error = validated.take_error();
    }
    CAPTURE(mockidp::to_string(c.fault));
    CHECK(error.code == c.code);
    if (!c.detail_contains.empty()) {
      CHECK(error.detail.find(c.detail_contains) != std::string::npos);
    }
    // bijection: no two faults share (code, detail-class)
    CHECK(seen.insert({error.code, c.detail_contains}).second);
  }
  // fault=None completes the picture: pipeline succeeds.
  auto issued = fx.issue(FaultMode::None);
  auto validated = fx.run_pipeline(issued.response_xml, issued.tracker);
  REQUIRE(validated.ok());
  CHECK(saml::extract_user_info(validated.value()).ok());
}

TEST_CASE("replay cache detects reuse and honors capacity") {
  saml::ReplayCache cache(3);
  const UtcTime expiry = kNow + std::chrono::seconds(300);
  CHECK(cache.insert("a", expiry, kNow));
  CHECK_FALSE(cache.insert("a", expiry, kNow));
  CHECK(cache.insert("b", expiry, kNow));
  CHECK(cache.insert("c", expiry, kNow));
  CHECK(cache.insert("d", expiry, kNow));  // evicts "a"
  CHECK(cache.insert("a", expiry, kNow));

  // TTL expiry frees the id for reuse.
  saml::ReplayCache ttl(10);
  CHECK(ttl.insert("x", kNow + std::chrono::seconds(5), kNow));
  CHECK_FALSE(ttl.insert("x", kNow + std::chrono::seconds(5), kNow));
  CHECK(ttl.insert("x", kNow + std::chrono::seconds(500),
                   kNow + std::chrono::seconds(6)));
}
