// Copyright 2026 The egress-warden Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <string>

#include "support/fixtures.h"
#include "support/generators.h"
#include "warden/error.h"
#include "warden/policy_io.h"

namespace warden {
namespace {

using testing::Ip;
using testing::Net;
using testing::ReferencePolicy;

constexpr char kMinimal[] = R"({
  "zones": [{"name": "core", "kind": "internal", "subnet": "172.28.0.0/24", "routed_gateway": false}],
  "services": [{"name": "backend", "attachments": ["core"]}]
})";

TEST(ParsePolicy, MinimalDocument) {
  const IsolationPolicy p = ParsePolicy(kMinimal);
  ASSERT_EQ(p.zones.size(), 1u);
  ASSERT_EQ(p.services.size(), 1u);
  EXPECT_EQ(p.zones[0].name, "core");
  EXPECT_EQ(p.zones[0].kind, ZoneKind::kInternal);
  EXPECT_EQ(p.zones[0].subnet, Net("172.28.0.0/24"));
  EXPECT_EQ(p.services[0].attachments, std::vector<std::string>{"core"});
  EXPECT_TRUE(p.service_links.empty());
  EXPECT_TRUE(p.airlocks.empty());
  EXPECT_TRUE(p.ingress.empty());
  EXPECT_EQ(p.tls.min_version, TlsVersion::kTls12);
}

TEST(ParsePolicy, CanonicalizesSubnets) {
  std::string doc = kMinimal;
  doc.replace(doc.find("172.28.0.0/24"), 13, "172.28.0.1/24");
  EXPECT_EQ(ParsePolicy(doc).zones[0].subnet.ToString(), "172.28.0.0/24");
}

TEST(ParsePolicy, MissingZonesIsSyntaxError) {
  EXPECT_THROW(ParsePolicy(R"({"services": []})"), SyntaxError);
}

TEST(ParsePolicy, MalformedJsonReportsLine) {
  try {
    ParsePolicy("{\n  \"zones\": [\n  oops\n]}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParsePolicy, UnknownFieldStrictAndLenient) {
  std::string doc = kMinimal;
  doc.insert(doc.rfind('}'), R"(, "colour": "blue")");
  EXPECT_THROW(ParsePolicy(doc), UnknownFieldError);
  EXPECT_NO_THROW(ParsePolicy(doc, ParseOptions{.strict = false}));
  try {
    ParsePolicy(doc);
  } catch (const UnknownFieldError& e) {
    EXPECT_EQ(e.path(), "/colour");
  }
}

TEST(ParsePolicy, NestedUnknownFieldCarriesPath) {
  const std::string doc = R"({
    "zones": [{"name": "core", "kind": "internal", "subnet": "10.0.0.0/24", "gw": 1}],
    "services": []})";
  try {
    ParsePolicy(doc);
    FAIL();
  } catch (const UnknownFieldError& e) {
    EXPECT_EQ(e.path(), "/zones/0/gw");
  }
}

TEST(ParsePolicy, TypeErrorsAreSyntaxErrors) {
  for (const char* doc : {
           R"({"zones": {}, "services": []})",
           R"({"zones": [{"name": "c", "kind": "moat", "subnet": "10.0.0.0/24"}], "services": []})",
           R"({"zones": [{"name": "c", "kind": "internal", "subnet": "10.0.0.0/40"}], "services": []})",
           R"({"zones": [], "services": [{"name": "s", "attachments": "core"}]})",
           R"({"zones": [], "services": [], "service_links": [{"from": "a", "to": "b", "port": 1, "proto": "sctp"}]})",
           R"({"zones": [], "services": [], "tls": {"min_version": "1.4"}})",
           R"({"zones": [], "services": [], "airlocks": [{"name": "a", "from_service": "s", "via_zone": "z", "target_ip": "10.0.0.1", "target_port": 1, "proto": "tcp"}]})",
           R"([1, 2])",
       }) {
    EXPECT_THROW(ParsePolicy(doc), SyntaxError) << doc;
  }
}

TEST(ParsePolicy, ReferenceFixtureShape) {
  const IsolationPolicy& p = ReferencePolicy();
  ASSERT_EQ(p.zones.size(), 3u);
  EXPECT_EQ(p.FindZone("ingress-dmz")->subnet, Net("172.26.0.0/24"));
  EXPECT_EQ(p.FindZone("core")->subnet, Net("172.28.0.0/24"));
  EXPECT_EQ(p.FindZone("egress-dmz")->subnet, Net("172.30.0.0/24"));
  ASSERT_EQ(p.services.size(), 5u);
  EXPECT_EQ(p.FindService("ingress-proxy")->published_ports,
            (std::vector<PortBinding>{{443, Protocol::kTcp}}));
  ASSERT_EQ(p.airlocks.size(), 1u);
  EXPECT_EQ(p.airlocks[0].target_ip, Ip("10.0.5.10"));
  EXPECT_EQ(p.airlocks[0].target_port, 636);
  EXPECT_TRUE(p.airlocks[0].require_upstream_tls_verification);
  ASSERT_EQ(p.ingress.size(), 1u);
  EXPECT_EQ(p.ingress[0].source, Net("10.0.0.0/8"));
  EXPECT_EQ(p.service_links.size(), 4u);
}

TEST(ResolveEndpoints, DeterministicAllocation) {
  const auto eps = ResolveEndpoints(ReferencePolicy());
  auto at = [&](const char* s, const char* z) { return FindEndpoint(eps, s, z)->ip; };
  EXPECT_EQ(at("ingress-proxy", "ingress-dmz"), Ip("172.26.0.2"));
  EXPECT_EQ(at("ingress-proxy", "core"), Ip("172.28.0.2"));
  EXPECT_EQ(at("frontend", "core"), Ip("172.28.0.3"));
  EXPECT_EQ(at("backend", "core"), Ip("172.28.0.4"));
  EXPECT_EQ(at("monitoring", "core"), Ip("172.28.0.5"));
  EXPECT_EQ(at("ldap-proxy", "core"), Ip("172.28.0.6"));
  EXPECT_EQ(at("ldap-proxy", "egress-dmz"), Ip("172.30.0.2"));
  EXPECT_EQ(eps.size(), 7u);
  for (const Endpoint& ep : eps) {
    EXPECT_TRUE(ReferencePolicy().FindZone(ep.zone)->subnet.Contains(ep.ip));
  }
}

TEST(ResolveEndpoints, ExplicitAddressWins) {
  IsolationPolicy p = ReferencePolicy();
  p.services[2].addresses["core"] = Ip("172.28.0.200");
  const auto eps = ResolveEndpoints(p);
  EXPECT_EQ(FindEndpoint(eps, "backend", "core")->ip, Ip("172.28.0.200"));
}

TEST(SelectSourceEndpoint, PrefersZoneOfDestinationThenEgress) {
  const auto& p = ReferencePolicy();
  const auto eps = ResolveEndpoints(p);
  EXPECT_EQ(SelectSourceEndpoint(p, eps, "ldap-proxy", Ip("172.28.0.4"))->zone, "core");
  EXPECT_EQ(SelectSourceEndpoint(p, eps, "ldap-proxy", Ip("10.0.5.10"))->zone, "egress-dmz");
  EXPECT_EQ(SelectSourceEndpoint(p, eps, "ingress-proxy", Ip("8.8.8.8"))->zone, "ingress-dmz");
  EXPECT_FALSE(SelectSourceEndpoint(p, eps, "nobody", Ip("8.8.8.8")));
}

TEST(RenderPolicy, FixtureRoundTrips) {
  const IsolationPolicy& p = ReferencePolicy();
  EXPECT_EQ(ParsePolicy(RenderPolicy(p)), p);
}

TEST(RenderPolicy, RoundTripIsIdempotentOnRandomPolicies) {
  testing::Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const IsolationPolicy p = testing::RandomPolicy(rng);
    const IsolationPolicy once = ParsePolicy(RenderPolicy(p));
    ASSERT_EQ(once, p) << RenderPolicy(p);
    ASSERT_EQ(ParsePolicy(RenderPolicy(once)), once);
    ASSERT_EQ(RenderPolicy(once), RenderPolicy(p));
  }
}

TEST(PolicyDigest, StableAndSensitive) {
  const IsolationPolicy& p = ReferencePolicy();
  const std::string d = PolicyDigest(p);
  EXPECT_EQ(d.size(), 64u);
  EXPECT_EQ(d.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(PolicyDigest(ParsePolicy(RenderPolicy(p))), d);
  IsolationPolicy q = p;
  q.airlocks[0].target_port = 637;
  EXPECT_NE(PolicyDigest(q), d);
}

TEST(Sha256Hex, KnownVectors) {
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace warden
