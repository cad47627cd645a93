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

#include <algorithm>
#include <set>
#include <tuple>

#include "support/fixtures.h"
#include "support/generators.h"
#include "warden/error.h"
#include "warden/flow.h"
#include "warden/ruleset.h"
#include "warden/validate.h"

namespace warden {
namespace {

using testing::Ip;
using testing::Net;
using testing::ReferencePolicy;

// Rules from the airlock band: New-state accepts whose destination is a
// host prefix outside every zone subnet.
std::vector<FirewallRule> AirlockBand(const IsolationPolicy& p, const FirewallRuleSet& rs) {
  std::vector<FirewallRule> out;
  for (const FirewallRule& r : rs.rules) {
    if (r.action != RuleAction::kAccept || !r.dst || r.state != StateMatch::kNew) continue;
    const bool inside = std::any_of(p.zones.begin(), p.zones.end(),
                                    [&](const Zone& z) { return z.subnet.Contains(*r.dst); });
    if (!inside) out.push_back(r);
  }
  return out;
}

TEST(Compile, FixtureAirlockBandHoldsExactlyThePin) {
  const IsolationPolicy& p = ReferencePolicy();
  const FirewallRuleSet rs = Compile(p);
  const auto band = AirlockBand(p, rs);
  ASSERT_EQ(band.size(), p.airlocks.size());
  ASSERT_EQ(band.size(), 1u);
  EXPECT_EQ(band[0].src, Net("172.30.0.0/24"));
  EXPECT_EQ(band[0].dst, Net("10.0.5.10/32"));
  EXPECT_EQ(band[0].dest_port, 636);
  EXPECT_EQ(band[0].proto, Protocol::kTcp);
}

TEST(Compile, FixtureBandOrder) {
  const FirewallRuleSet rs = Compile(ReferencePolicy());
  std::vector<std::string> ids;
  for (const auto& r : rs.rules) ids.push_back(r.id);
  EXPECT_EQ(ids, (std::vector<std::string>{
                     "established",
                     "accept-tcp-10.0.0.0/8-to-172.26.0.2/32-443-new",
                     "accept-tcp-172.30.0.0/24-to-10.0.5.10/32-636-new",
                     "accept-tcp-172.28.0.3/32-to-172.28.0.4/32-8000-new",
                     "accept-tcp-172.28.0.3/32-to-172.28.0.6/32-3389-new",
                     "accept-tcp-172.28.0.2/32-to-172.28.0.3/32-8080-new",
                     "accept-tcp-172.28.0.5/32-to-172.28.0.4/32-8000-new",
                     "deny-all",
                 }));
  for (size_t i = 1; i < rs.rules.size(); ++i) {
    EXPECT_LT(rs.rules[i - 1].priority, rs.rules[i].priority);
  }
}

TEST(Compile, NoAirlocksNoIngress) {
  IsolationPolicy p = ReferencePolicy();
  p.airlocks.clear();
  p.ingress.clear();
  const FirewallRuleSet rs = Compile(p);
  ASSERT_EQ(rs.rules.size(), 2 + p.service_links.size());
  EXPECT_EQ(rs.rules.front().id, "established");
  EXPECT_EQ(rs.rules.front().state, StateMatch::kEstablishedRelated);
  for (size_t i = 1; i + 1 < rs.rules.size(); ++i) {
    EXPECT_EQ(rs.rules[i].action, RuleAction::kAccept);
    EXPECT_TRUE(rs.rules[i].src->is_host());
    EXPECT_TRUE(rs.rules[i].dst->is_host());
  }
  EXPECT_TRUE(rs.rules.back().IsCatchAllDeny());
}

TEST(Compile, RejectsInvalidPolicy) {
  IsolationPolicy p = ReferencePolicy();
  p.zones[1].routed_gateway = true;
  try {
    Compile(p);
    FAIL();
  } catch (const InvalidPolicyError& e) {
    EXPECT_NE(std::string(e.what()).find("INVALID_POLICY"), std::string::npos);
  }
}

TEST(Compile, LinkAcrossTwoSharedZonesEmitsOneRulePerZone) {
  IsolationPolicy p = ReferencePolicy();
  p.zones.push_back({"aux", ZoneKind::kEgressDmz, Net("192.168.50.0/24"), false});
  p.services[1].attachments.push_back("aux");  // frontend
  p.services[2].attachments.push_back("aux");  // backend
  const FirewallRuleSet rs = Compile(p);
  int matches = 0;
  for (const auto& r : rs.rules) {
    if (r.dest_port == 8000 && r.src && (*r.src == Net("172.28.0.3/32") ||
                                         *r.src == Net("192.168.50.2/32"))) {
      ++matches;
    }
  }
  EXPECT_EQ(matches, 2);
}

TEST(CompileProperty, DeterministicAndDefaultDeny) {
  testing::Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const IsolationPolicy p = testing::RandomPolicy(rng);
    const FirewallRuleSet a = Compile(p);
    const FirewallRuleSet b = Compile(p);
    ASSERT_EQ(RenderRuleset(a), RenderRuleset(b));
    ASSERT_TRUE(a.rules.back().IsCatchAllDeny());
    ASSERT_NO_THROW(CheckRulesetWellFormed(a));
  }
}

TEST(CompileProperty, NoAcceptToPublicDestination) {
  testing::Rng rng(37);
  for (int i = 0; i < 500; ++i) {
    const IsolationPolicy p = testing::RandomPolicy(rng);
    for (const FirewallRule& r : Compile(p).rules) {
      if (r.action != RuleAction::kAccept) continue;
      if (r.state == StateMatch::kEstablishedRelated) continue;
      ASSERT_TRUE(r.dst.has_value()) << r.id;
      ASSERT_TRUE(IsPrivateCidr(*r.dst)) << r.id;
    }
  }
}

TEST(CompileProperty, AirlockBandEqualsPinSet) {
  testing::Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    const IsolationPolicy p = testing::RandomPolicy(rng);
    std::set<std::tuple<IpAddress, int, Protocol>> pins, band;
    for (const Airlock& a : p.airlocks) pins.emplace(a.target_ip, a.target_port, a.proto);
    for (const FirewallRule& r : AirlockBand(p, Compile(p))) {
      ASSERT_TRUE(r.dst->is_host());
      band.emplace(r.dst->network(), *r.dest_port, r.proto);
    }
    ASSERT_EQ(band, pins);
  }
}

TEST(CompileProperty, NoIcmpAccepts) {
  testing::Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    for (const FirewallRule& r : Compile(testing::RandomPolicy(rng)).rules) {
      if (r.action == RuleAction::kAccept && r.state != StateMatch::kEstablishedRelated) {
        ASSERT_NE(r.proto, Protocol::kIcmp);
        ASSERT_NE(r.proto, Protocol::kAny);
      }
    }
  }
}

TEST(RenderRule, DenyAllLine) {
  FirewallRule deny;
  deny.action = RuleAction::kDeny;
  EXPECT_EQ(RenderRule(deny), "-A FWD -s any -d any -p any -j DENY");
}

TEST(RenderRule, FixtureAirlockLine) {
  const auto band = AirlockBand(ReferencePolicy(), Compile(ReferencePolicy()));
  ASSERT_EQ(band.size(), 1u);
  EXPECT_EQ(RenderRule(band[0]),
            "-A FWD -s 172.30.0.0/24 -d 10.0.5.10/32 -p tcp --dport 636 -m state NEW -j ACCEPT");
}

TEST(RenderRuleset, HeaderCarriesHash) {
  const FirewallRuleSet rs = Compile(ReferencePolicy());
  const std::string text = RenderRuleset(rs);
  EXPECT_EQ(text.rfind("# egress-warden ruleset policy_hash=" + rs.policy_hash + "\n", 0), 0u);
  EXPECT_EQ(rs.policy_hash.size(), 64u);
  EXPECT_NE(text.find("-A FWD -s any -d any -p any -m state EST -j ACCEPT\n"), std::string::npos);
  EXPECT_TRUE(text.ends_with("-A FWD -s any -d any -p any -j DENY\n"));
}

TEST(RenderRuleset, RefusesEmptyRuleset) {
  FirewallRuleSet empty;
  empty.policy_hash = std::string(64, '0');
  try {
    RenderRuleset(empty);
    FAIL();
  } catch (const InvalidRulesetError& e) {
    EXPECT_NE(std::string(e.what()).find("INVALID_RULESET"), std::string::npos);
  }
}

TEST(RenderRuleset, RefusesMissingDefaultDeny) {
  FirewallRuleSet rs = Compile(ReferencePolicy());
  rs.rules.pop_back();
  EXPECT_THROW(RenderRuleset(rs), InvalidRulesetError);
}

TEST(ParseRuleset, RoundTripsFixture) {
  const FirewallRuleSet rs = Compile(ReferencePolicy());
  EXPECT_EQ(ParseRuleset(RenderRuleset(rs)), rs);
}

TEST(ParseRuleset, RoundTripsRandomPolicies) {
  testing::Rng rng(47);
  for (int i = 0; i < 300; ++i) {
    const FirewallRuleSet rs = Compile(testing::RandomPolicy(rng));
    ASSERT_EQ(ParseRuleset(RenderRuleset(rs)), rs);
  }
}

TEST(ParseRuleset, RejectsBadInput) {
  const std::string header = "# egress-warden ruleset policy_hash=" + std::string(64, 'a') + "\n";
  EXPECT_THROW(ParseRuleset(""), SyntaxError);
  EXPECT_THROW(ParseRuleset(header), SyntaxError);
  EXPECT_THROW(ParseRuleset(header + "-A FWD -s any -d any -p any -j LOG\n"), SyntaxError);
  EXPECT_THROW(ParseRuleset("-A FWD -s any -d any -p any -j DENY\n"), SyntaxError);
  EXPECT_THROW(ParseRuleset("# egress-warden ruleset policy_hash=xyz\n"
                            "-A FWD -s any -d any -p any -j DENY\n"),
               SyntaxError);
  EXPECT_THROW(ParseRuleset(header + "-A FWD -s any -d any -p tcp --dport 0 -j DENY\n"),
               SyntaxError);
  EXPECT_THROW(ParseRuleset(header + "-A FWD -d any -s any -p any -j DENY\n"), SyntaxError);
  EXPECT_THROW(ParseRuleset(header + "-A FWD -s 10.0.0.0/33 -d any -p any -j DENY\n"),
               SyntaxError);
  EXPECT_THROW(ParseRuleset(header + "-A FWD -s any -d any -p any -m state OLD -j DENY\n"),
               SyntaxError);
}

TEST(ParseRuleset, ReportsOffendingLine) {
  const std::string text = "# egress-warden ruleset policy_hash=" + std::string(64, 'a') +
                           "\n-A FWD -s any -d any -p any -m state EST -j ACCEPT\n"
                           "-A FWD -s any -d any -p any -j LOG\n";
  try {
    ParseRuleset(text);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(DiffRulesets, Identity) {
  const FirewallRuleSet rs = Compile(ReferencePolicy());
  EXPECT_TRUE(DiffRulesets(rs, rs).empty());
}

TEST(DiffRulesets, MissingDenyAll) {
  const FirewallRuleSet expected = Compile(ReferencePolicy());
  FirewallRuleSet observed = expected;
  observed.rules.pop_back();
  const RuleDiff d = DiffRulesets(expected, observed);
  ASSERT_EQ(d.missing.size(), 1u);
  EXPECT_EQ(d.missing[0].id, "deny-all");
  EXPECT_TRUE(d.unexpected.empty());
  EXPECT_TRUE(d.reordered.empty());
}

TEST(DiffRulesets, IsolatesInjectedPublicAccept) {
  const FirewallRuleSet expected = Compile(ReferencePolicy());
  FirewallRuleSet observed = expected;
  FirewallRule leak;
  leak.src = Net("172.28.0.0/24");
  leak.dst = Net("8.8.8.8/32");
  leak.proto = Protocol::kTcp;
  leak.dest_port = 443;
  leak.state = StateMatch::kNew;
  leak.action = RuleAction::kAccept;
  leak.id = RuleIdFor(leak);
  observed.rules.insert(observed.rules.end() - 1, leak);
  const RuleDiff d = DiffRulesets(expected, observed);
  ASSERT_EQ(d.unexpected.size(), 1u);
  EXPECT_EQ(d.unexpected[0].Key(), leak.Key());
  EXPECT_TRUE(d.missing.empty());
  EXPECT_TRUE(d.reordered.empty());
}

TEST(DiffRulesets, IgnoresIdsAndPriorities) {
  const FirewallRuleSet expected = Compile(ReferencePolicy());
  FirewallRuleSet observed = expected;
  for (size_t i = 0; i < observed.rules.size(); ++i) {
    observed.rules[i].id = "r" + std::to_string(i);
    observed.rules[i].priority = 1000 + static_cast<int>(i);
  }
  EXPECT_TRUE(DiffRulesets(expected, observed).empty());
}

TEST(DiffRulesets, DetectsReorder) {
  const FirewallRuleSet expected = Compile(ReferencePolicy());
  FirewallRuleSet observed = expected;
  std::swap(observed.rules[3], observed.rules[4]);
  const RuleDiff d = DiffRulesets(expected, observed);
  EXPECT_TRUE(d.missing.empty());
  EXPECT_TRUE(d.unexpected.empty());
  ASSERT_EQ(d.reordered.size(), 1u);
  EXPECT_EQ(d.reordered[0].first, expected.rules[3].id);
  EXPECT_EQ(d.reordered[0].second, expected.rules[4].id);
}

// Random edits: drop, duplicate, inject and swap rules.
FirewallRuleSet Perturb(testing::Rng& rng, FirewallRuleSet rs) {
  const int edits = static_cast<int>(rng() % 4);
  for (int e = 0; e < edits && !rs.rules.empty(); ++e) {
    const size_t i = rng() % rs.rules.size();
    switch (rng() % 4) {
      case 0: rs.rules.erase(rs.rules.begin() + i); break;
      case 1: rs.rules.insert(rs.rules.begin() + i, rs.rules[i]); break;
      case 2: {
        FirewallRule r;
        r.dst = Cidr(IpAddress::V4(static_cast<uint32_t>(rng())), 32);
        r.proto = Protocol::kUdp;
        r.dest_port = 53;
        r.state = StateMatch::kNew;
        r.action = RuleAction::kAccept;
        rs.rules.insert(rs.rules.begin() + i, r);
        break;
      }
      default: std::swap(rs.rules[i], rs.rules[rng() % rs.rules.size()]); break;
    }
  }
  return rs;
}

TEST(DiffRulesetsProperty, MissingAndUnexpectedAreSymmetric) {
  testing::Rng rng(53);
  for (int i = 0; i < 300; ++i) {
    const FirewallRuleSet base = Compile(testing::RandomPolicy(rng));
    const FirewallRuleSet a = Perturb(rng, base);
    const FirewallRuleSet b = Perturb(rng, base);
    const RuleDiff ab = DiffRulesets(a, b);
    const RuleDiff ba = DiffRulesets(b, a);
    auto keys = [](const std::vector<FirewallRule>& rules) {
      std::multiset<FirewallRule::KeyType> out;
      for (const auto& r : rules) out.insert(r.Key());
      return out;
    };
    ASSERT_EQ(keys(ab.missing), keys(ba.unexpected));
    ASSERT_EQ(keys(ab.unexpected), keys(ba.missing));
    ASSERT_EQ(DiffRulesets(a, a).empty(), true);
  }
}

}  // namespace
}  // namespace warden
