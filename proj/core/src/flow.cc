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

#include "warden/flow.h"

#include <algorithm>

#include "warden/validate.h"

namespace warden {
namespace {

bool IsTransport(Protocol p) { return p == Protocol::kTcp || p == Protocol::kUdp; }

const IpAddress& External() {
  static const IpAddress kAddr = *IpAddress::Parse("203.0.113.7");
  return kAddr;
}

}  // namespace

std::string_view ToString(FlowState state) {
  return state == FlowState::kNew ? "new" : "established";
}

std::string_view ToString(Decision decision) {
  return decision == Decision::kAllow ? "ALLOW" : "DENY";
}

std::optional<FlowState> ParseFlowState(std::string_view text) {
  if (text == "new") return FlowState::kNew;
  if (text == "established" || text == "est") return FlowState::kEstablishedRelated;
  return std::nullopt;
}

bool FlowQuery::IsWellFormed() const {
  if (proto == Protocol::kAny) return false;
  if (IsTransport(proto) != dst_port.has_value()) return false;
  return !dst_port || (*dst_port >= 1 && *dst_port <= 65535);
}

std::string FlowQuery::ToString() const {
  std::string out = (src.is_external() ? std::string("external") : src.service) +
                    "[" + src.ip.ToString() + "] -> " + dst_ip.ToString();
  if (dst_port) out += ":" + std::to_string(*dst_port);
  out += " " + std::string(warden::ToString(proto)) + " " +
         std::string(warden::ToString(state));
  return out;
}

bool RuleMatches(const FirewallRule& rule, const FlowQuery& flow) {
  if (rule.state != StateMatch::kAny &&
      (rule.state == StateMatch::kNew) != (flow.state == FlowState::kNew)) {
    return false;
  }
  if (rule.proto != Protocol::kAny && rule.proto != flow.proto) return false;
  if (rule.dest_port && flow.dst_port != rule.dest_port) return false;
  if (rule.src && !rule.src->Contains(flow.src.ip)) return false;
  if (rule.dst && !rule.dst->Contains(flow.dst_ip)) return false;
  return true;
}

Verdict EvaluateFlow(const FirewallRuleSet& ruleset, const FlowQuery& flow) {
  for (const FirewallRule& rule : ruleset.rules) {
    if (!RuleMatches(rule, flow)) continue;
    Verdict v;
    v.decision =
        rule.action == RuleAction::kAccept ? Decision::kAllow : Decision::kDeny;
    v.matched_rule_id = rule.id;
    v.rationale = "matched " + rule.id + " at priority " +
                  std::to_string(rule.priority);
    return v;
  }
  return {Decision::kDeny, "", "no rule matched"};
}

PolicyDecider::PolicyDecider(IsolationPolicy policy) : policy_(std::move(policy)) {
  RequireValid(policy_);
  endpoints_ = ResolveEndpoints(policy_);
  for (const ServiceLink& l : policy_.service_links) {
    links_.emplace(l.from_service, l.to_service, l.dest_port, l.proto);
  }
}

const Endpoint* PolicyDecider::EndpointAt(const IpAddress& ip) const {
  for (const Endpoint& ep : endpoints_) {
    if (ep.ip == ip) return &ep;
  }
  return nullptr;
}

Decision PolicyDecider::Decide(const FlowQuery& flow) const {
  if (flow.state == FlowState::kEstablishedRelated) return Decision::kAllow;
  // Every allowing clause below is a port-bearing transport match.
  if (!IsTransport(flow.proto) || !flow.dst_port) return Decision::kDeny;
  if (IngressAllows(flow) || AirlockAllows(flow) || LinkAllows(flow)) {
    return Decision::kAllow;
  }
  return Decision::kDeny;
}

bool PolicyDecider::IngressAllows(const FlowQuery& flow) const {
  for (const IngressRule& g : policy_.ingress) {
    if (g.proto != flow.proto || g.dest_port != *flow.dst_port) continue;
    if (!g.source.Contains(flow.src.ip)) continue;
    const Endpoint* target = EndpointAt(flow.dst_ip);
    if (target == nullptr || target->service != g.to_service) continue;
    const Zone* zone = policy_.FindZone(target->zone);
    if (zone->kind == ZoneKind::kIngressDmz) return true;
  }
  return false;
}

bool PolicyDecider::AirlockAllows(const FlowQuery& flow) const {
  for (const Airlock& a : policy_.airlocks) {
    if (a.proto == flow.proto && a.target_port == *flow.dst_port &&
        a.target_ip == flow.dst_ip &&
        policy_.FindZone(a.via_zone)->subnet.Contains(flow.src.ip)) {
      return true;
    }
  }
  return false;
}

bool PolicyDecider::LinkAllows(const FlowQuery& flow) const {
  const Endpoint* from = EndpointAt(flow.src.ip);
  const Endpoint* to = EndpointAt(flow.dst_ip);
  if (from == nullptr || to == nullptr || from->zone != to->zone) return false;
  return links_.contains({from->service, to->service, *flow.dst_port, flow.proto});
}

Decision DecideByPolicy(const IsolationPolicy& policy, const FlowQuery& flow) {
  return PolicyDecider(policy).Decide(flow);
}

std::set<EgressTuple> EnumerateAllowedEgress(const IsolationPolicy& policy) {
  const PolicyDecider decider(policy);
  std::set<std::tuple<IpAddress, int, Protocol>> named;
  for (const Airlock& a : policy.airlocks) {
    named.emplace(a.target_ip, a.target_port, a.proto);
  }
  for (const IngressRule& g : policy.ingress) {
    for (const Endpoint& ep : decider.endpoints()) {
      if (ep.service == g.to_service) named.emplace(ep.ip, g.dest_port, g.proto);
    }
  }
  for (const ServiceLink& l : policy.service_links) {
    for (const Endpoint& ep : decider.endpoints()) {
      if (ep.service == l.to_service) named.emplace(ep.ip, l.dest_port, l.proto);
    }
  }

  std::set<EgressTuple> out;
  for (const auto& [ip, port, proto] : named) {
    const bool inside = std::any_of(
        policy.zones.begin(), policy.zones.end(),
        [&](const Zone& z) { return z.subnet.Contains(ip); });
    if (inside) continue;
    for (const Endpoint& src : decider.endpoints()) {
      FlowQuery flow{src, ip, port, proto, FlowState::kNew};
      if (decider.Decide(flow) == Decision::kAllow) {
        out.insert({src.service, ip, port, proto});
      }
    }
  }
  return out;
}

const std::vector<IpAddress>& PublicProbeTargets() {
  static const std::vector<IpAddress> kTargets = {
      *IpAddress::Parse("8.8.8.8"),
      *IpAddress::Parse("1.1.1.1"),
      *IpAddress::Parse("8.8.4.4"),
  };
  return kTargets;
}

std::vector<FlowQuery> FlowUniverse(const IsolationPolicy& policy) {
  const std::vector<Endpoint> endpoints = ResolveEndpoints(policy);

  std::vector<Endpoint> sources = endpoints;
  auto add_external = [&](const IpAddress& ip) {
    for (const Endpoint& ep : sources) {
      if (ep.ip == ip) return;
    }
    sources.push_back({"", ip, ""});
  };
  for (const IngressRule& g : policy.ingress) {
    add_external(g.source.HostAt(g.source.is_host() ? 0 : 1).value_or(g.source.network()));
  }
  if (!policy.ingress.empty()) {
    const bool covered = std::any_of(
        policy.ingress.begin(), policy.ingress.end(),
        [](const IngressRule& g) { return g.source.Contains(External()); });
    if (!covered) add_external(External());
  }

  std::set<IpAddress> dsts;
  for (const Zone& z : policy.zones) {
    if (auto ip = z.subnet.HostAt(10)) dsts.insert(*ip);
  }
  for (const Endpoint& ep : endpoints) dsts.insert(ep.ip);
  for (const Airlock& a : policy.airlocks) {
    dsts.insert(a.target_ip);
    for (int d : {-1, 1}) {
      if (auto ip = a.target_ip.Offset(d)) dsts.insert(*ip);
    }
  }
  dsts.insert(PublicProbeTargets()[0]);
  dsts.insert(PublicProbeTargets()[1]);

  std::set<int> ports = {80, 443, 636, 8000, 8080, 3389};
  auto add_port = [&](int p) {
    if (p >= 1 && p <= 65535) ports.insert(p);
  };
  for (const ServiceLink& l : policy.service_links) add_port(l.dest_port);
  for (const IngressRule& g : policy.ingress) add_port(g.dest_port);
  for (const Airlock& a : policy.airlocks) {
    for (int d : {-1, 0, 1}) add_port(a.target_port + d);
  }
  for (const ServiceSpec& s : policy.services) {
    for (const PortBinding& p : s.published_ports) add_port(p.port);
  }

  std::vector<FlowQuery> flows;
  for (const Endpoint& src : sources) {
    for (const IpAddress& dst : dsts) {
      for (FlowState state : {FlowState::kNew, FlowState::kEstablishedRelated}) {
        for (Protocol proto : {Protocol::kTcp, Protocol::kUdp}) {
          for (int port : ports) flows.push_back({src, dst, port, proto, state});
        }
        flows.push_back({src, dst, std::nullopt, Protocol::kIcmp, state});
      }
    }
  }
  return flows;
}

}  // namespace warden
