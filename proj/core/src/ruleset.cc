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

#include "warden/ruleset.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "warden/error.h"
#include "warden/policy_io.h"
#include "warden/validate.h"

namespace warden {
namespace {

constexpr char kHeaderPrefix[] = "# egress-warden ruleset policy_hash=";

std::string MatchText(const std::optional<Cidr>& cidr) {
  return cidr ? cidr->ToString() : "any";
}

FirewallRule Accept(Cidr src, Cidr dst, Protocol proto, int port) {
  FirewallRule rule;
  rule.src = std::move(src);
  rule.dst = std::move(dst);
  rule.proto = proto;
  rule.dest_port = port;
  rule.state = StateMatch::kNew;
  rule.action = RuleAction::kAccept;
  return rule;
}

// Rules of one band with the name they sort under.
using Band = std::vector<std::pair<std::string, FirewallRule>>;

void SortBand(Band& band) {
  std::sort(band.begin(), band.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second.src, a.second.dst, a.second.proto,
                    a.second.dest_port, a.second.state, a.second.action) <
           std::tie(b.first, b.second.src, b.second.dst, b.second.proto,
                    b.second.dest_port, b.second.state, b.second.action);
  });
}

std::optional<Endpoint> IngressEndpoint(const IsolationPolicy& policy,
                                        const std::vector<Endpoint>& endpoints,
                                        const std::string& service) {
  const ServiceSpec* spec = policy.FindService(service);
  for (const std::string& zone : spec->attachments) {
    if (policy.FindZone(zone)->kind == ZoneKind::kIngressDmz) {
      return FindEndpoint(endpoints, service, zone);
    }
  }
  return std::nullopt;
}

bool ParseInt(std::string_view text, int& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

std::optional<Cidr> ParseMatch(std::string_view token, bool& ok) {
  ok = true;
  if (token == "any") return std::nullopt;
  // Addresses are always rendered with an explicit prefix length.
  if (token.find('/') == std::string_view::npos) {
    ok = false;
    return std::nullopt;
  }
  auto cidr = Cidr::Parse(token);
  if (!cidr || cidr->ToString() != token) ok = false;
  return cidr;
}

FirewallRule ParseRuleLine(std::string_view line, int line_no) {
  std::vector<std::string> tok;
  {
    std::istringstream in{std::string(line)};
    std::string t;
    while (in >> t) tok.push_back(t);
  }
  auto fail = [line_no](const std::string& message) -> FirewallRule {
    throw SyntaxError(line_no, message);
  };
  size_t i = 0;
  auto expect = [&](std::string_view word) {
    if (i >= tok.size() || tok[i] != word) {
      fail("expected \"" + std::string(word) + "\"");
    }
    ++i;
  };
  auto value = [&](std::string_view what) -> const std::string& {
    if (i >= tok.size()) fail("missing " + std::string(what));
    return tok[i++];
  };

  FirewallRule rule;
  expect("-A");
  expect("FWD");
  expect("-s");
  bool ok = false;
  rule.src = ParseMatch(value("source"), ok);
  if (!ok) fail("bad source \"" + tok[i - 1] + "\"");
  expect("-d");
  rule.dst = ParseMatch(value("destination"), ok);
  if (!ok) fail("bad destination \"" + tok[i - 1] + "\"");
  expect("-p");
  auto proto = ParseProtocol(value("protocol"));
  if (!proto) fail("bad protocol \"" + tok[i - 1] + "\"");
  rule.proto = *proto;
  if (i < tok.size() && tok[i] == "--dport") {
    ++i;
    int port = 0;
    if (!ParseInt(value("port"), port) || port < 1 || port > 65535) {
      fail("bad port \"" + tok[i - 1] + "\"");
    }
    if (rule.proto != Protocol::kTcp && rule.proto != Protocol::kUdp) {
      fail("--dport requires -p tcp or -p udp");
    }
    rule.dest_port = port;
  }
  if (i < tok.size() && tok[i] == "-m") {
    ++i;
    expect("state");
    const std::string& state = value("state");
    if (state == "NEW") {
      rule.state = StateMatch::kNew;
    } else if (state == "EST") {
      rule.state = StateMatch::kEstablishedRelated;
    } else {
      fail("bad state \"" + state + "\"");
    }
  }
  expect("-j");
  const std::string& verdict = value("verdict");
  if (verdict == "ACCEPT") {
    rule.action = RuleAction::kAccept;
  } else if (verdict == "DENY") {
    rule.action = RuleAction::kDeny;
  } else {
    fail("unknown verdict \"" + verdict + "\"");
  }
  if (i != tok.size()) fail("trailing tokens after verdict");
  return rule;
}

}  // namespace

std::string_view ToString(StateMatch state) {
  switch (state) {
    case StateMatch::kNew: return "new";
    case StateMatch::kEstablishedRelated: return "est";
    case StateMatch::kAny: return "any";
  }
  return "?";
}

std::string_view ToString(RuleAction action) {
  return action == RuleAction::kAccept ? "accept" : "deny";
}

bool FirewallRule::IsCatchAllDeny() const {
  return action == RuleAction::kDeny && !src && !dst && proto == Protocol::kAny &&
         !dest_port && state == StateMatch::kAny;
}

std::string RuleIdFor(const FirewallRule& rule) {
  if (rule.IsCatchAllDeny()) return "deny-all";
  if (rule.action == RuleAction::kAccept && !rule.src && !rule.dst &&
      rule.proto == Protocol::kAny && !rule.dest_port &&
      rule.state == StateMatch::kEstablishedRelated) {
    return "established";
  }
  std::string id = std::string(ToString(rule.action)) + "-" +
                   std::string(ToString(rule.proto)) + "-" + MatchText(rule.src) +
                   "-to-" + MatchText(rule.dst);
  if (rule.dest_port) id += "-" + std::to_string(*rule.dest_port);
  if (rule.state != StateMatch::kAny) id += "-" + std::string(ToString(rule.state));
  return id;
}

FirewallRuleSet Compile(const IsolationPolicy& policy) {
  RequireValid(policy);
  const std::vector<Endpoint> endpoints = ResolveEndpoints(policy);

  std::vector<FirewallRule> rules;
  {
    FirewallRule established;
    established.proto = Protocol::kAny;
    established.state = StateMatch::kEstablishedRelated;
    established.action = RuleAction::kAccept;
    rules.push_back(established);
  }

  Band ingress;
  for (const IngressRule& g : policy.ingress) {
    auto ep = IngressEndpoint(policy, endpoints, g.to_service);
    ingress.emplace_back(g.to_service, Accept(g.source, Cidr::Host(ep->ip), g.proto,
                                              g.dest_port));
  }
  Band airlocks;
  for (const Airlock& a : policy.airlocks) {
    airlocks.emplace_back(a.from_service,
                          Accept(policy.FindZone(a.via_zone)->subnet,
                                 Cidr::Host(a.target_ip), a.proto, a.target_port));
  }
  Band links;
  for (const ServiceLink& l : policy.service_links) {
    const ServiceSpec* from = policy.FindService(l.from_service);
    for (const std::string& zone : from->attachments) {
      auto src = FindEndpoint(endpoints, l.from_service, zone);
      auto dst = FindEndpoint(endpoints, l.to_service, zone);
      if (!src || !dst) continue;
      links.emplace_back(l.from_service, Accept(Cidr::Host(src->ip),
                                                Cidr::Host(dst->ip), l.proto,
                                                l.dest_port));
    }
  }
  for (Band* band : {&ingress, &airlocks, &links}) {
    SortBand(*band);
    for (auto& [_, rule] : *band) rules.push_back(std::move(rule));
  }
  rules.emplace_back();  // catch-all deny

  FirewallRuleSet out;
  out.policy_hash = PolicyDigest(policy);
  std::set<FirewallRule::KeyType> seen;
  for (FirewallRule& rule : rules) {
    if (!seen.insert(rule.Key()).second) continue;
    rule.id = RuleIdFor(rule);
    rule.priority = 10 * static_cast<int>(out.rules.size() + 1);
    out.rules.push_back(std::move(rule));
  }
  return out;
}

void CheckRulesetWellFormed(const FirewallRuleSet& ruleset) {
  if (ruleset.rules.empty()) throw InvalidRulesetError("ruleset has no rules");
  std::set<std::string> ids;
  for (size_t i = 0; i < ruleset.rules.size(); ++i) {
    const FirewallRule& rule = ruleset.rules[i];
    if (!ids.insert(rule.id).second) {
      throw InvalidRulesetError("duplicate rule id " + rule.id);
    }
    if (i > 0 && rule.priority <= ruleset.rules[i - 1].priority) {
      throw InvalidRulesetError("priorities do not strictly increase at " + rule.id);
    }
  }
  if (!ruleset.rules.back().IsCatchAllDeny()) {
    throw InvalidRulesetError("last rule is not the catch-all deny");
  }
}

std::string RenderRule(const FirewallRule& rule) {
  std::string line = "-A FWD -s " + MatchText(rule.src) + " -d " +
                     MatchText(rule.dst) + " -p " + std::string(ToString(rule.proto));
  if (rule.dest_port) line += " --dport " + std::to_string(*rule.dest_port);
  if (rule.state == StateMatch::kNew) line += " -m state NEW";
  if (rule.state == StateMatch::kEstablishedRelated) line += " -m state EST";
  line += rule.action == RuleAction::kAccept ? " -j ACCEPT" : " -j DENY";
  return line;
}

std::string RenderRuleset(const FirewallRuleSet& ruleset) {
  CheckRulesetWellFormed(ruleset);
  std::string out = kHeaderPrefix + ruleset.policy_hash + "\n";
  for (const FirewallRule& rule : ruleset.rules) out += RenderRule(rule) + "\n";
  return out;
}

FirewallRuleSet ParseRuleset(std::string_view text) {
  if (text.empty()) throw SyntaxError(1, "empty ruleset");
  FirewallRuleSet out;
  int line_no = 0;
  bool header_seen = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      std::string_view prefix = kHeaderPrefix;
      if (line.substr(0, prefix.size()) != prefix) {
        throw SyntaxError(line_no, "missing ruleset header");
      }
      std::string_view hash = line.substr(prefix.size());
      if (hash.size() != 64 ||
          hash.find_first_not_of("0123456789abcdef") != std::string_view::npos) {
        throw SyntaxError(line_no, "policy_hash must be 64 lowercase hex digits");
      }
      out.policy_hash = std::string(hash);
      header_seen = true;
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    FirewallRule rule = ParseRuleLine(line, line_no);
    rule.id = RuleIdFor(rule);
    rule.priority = 10 * static_cast<int>(out.rules.size() + 1);
    out.rules.push_back(std::move(rule));
  }
  if (out.rules.empty()) throw SyntaxError(line_no, "ruleset has no rules");
  return out;
}

RuleDiff DiffRulesets(const FirewallRuleSet& expected,
                      const FirewallRuleSet& observed) {
  RuleDiff diff;
  std::map<FirewallRule::KeyType, int> remaining;
  for (const FirewallRule& rule : observed.rules) ++remaining[rule.Key()];
  for (const FirewallRule& rule : expected.rules) {
    auto it = remaining.find(rule.Key());
    if (it == remaining.end() || it->second == 0) {
      diff.missing.push_back(rule);
    } else {
      --it->second;
    }
  }
  remaining.clear();
  for (const FirewallRule& rule : expected.rules) ++remaining[rule.Key()];
  for (const FirewallRule& rule : observed.rules) {
    auto it = remaining.find(rule.Key());
    if (it == remaining.end() || it->second == 0) {
      diff.unexpected.push_back(rule);
    } else {
      --it->second;
    }
  }

  // Position of each key's first occurrence in observed.
  std::map<FirewallRule::KeyType, size_t> observed_pos;
  for (size_t i = 0; i < observed.rules.size(); ++i) {
    observed_pos.emplace(observed.rules[i].Key(), i);
  }
  std::vector<std::pair<const FirewallRule*, size_t>> shared;
  std::set<FirewallRule::KeyType> taken;
  for (const FirewallRule& rule : expected.rules) {
    auto it = observed_pos.find(rule.Key());
    if (it != observed_pos.end() && taken.insert(rule.Key()).second) {
      shared.emplace_back(&rule, it->second);
    }
  }
  for (size_t a = 0; a < shared.size(); ++a) {
    for (size_t b = a + 1; b < shared.size(); ++b) {
      if (shared[a].second > shared[b].second) {
        diff.reordered.emplace_back(shared[a].first->id, shared[b].first->id);
      }
    }
  }
  return diff;
}

}  // namespace warden
