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

#ifndef WARDEN_FLOW_H_
#define WARDEN_FLOW_H_

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "warden/ip.h"
#include "warden/policy.h"
#include "warden/ruleset.h"

namespace warden {

enum class FlowState { kNew, kEstablishedRelated };
enum class Decision { kAllow, kDeny };

std::string_view ToString(FlowState state);
std::string_view ToString(Decision decision);
std::optional<FlowState> ParseFlowState(std::string_view text);

// A connection attempt. dst_port is present iff proto is tcp or udp.
struct FlowQuery {
  Endpoint src;
  IpAddress dst_ip;
  std::optional<int> dst_port;
  Protocol proto = Protocol::kTcp;
  FlowState state = FlowState::kNew;

  bool IsWellFormed() const;
  std::string ToString() const;
  friend auto operator<=>(const FlowQuery&, const FlowQuery&) = default;
};

struct Verdict {
  Decision decision = Decision::kDeny;
  std::string matched_rule_id;  // empty when nothing matched
  std::string rationale;
};

bool RuleMatches(const FirewallRule& rule, const FlowQuery& flow);

// First matching rule in list order. A ruleset without a catch-all that
// matches nothing yields Deny with no rule id.
Verdict EvaluateFlow(const FirewallRuleSet& ruleset, const FlowQuery& flow);

// Decides flows straight from the policy declarations, without compiling.
// Only addresses matter, as on the wire; the endpoint's service and zone
// labels are not consulted. A flow is allowed iff
//   (a) it belongs to an established connection, or
//   (b) its source is inside an ingress rule's CIDR and it targets that
//       service's ingress-DMZ address on the rule's port/protocol, or
//   (c) its source is inside an airlock's egress zone and it hits the pin, or
//   (d) its source and destination addresses are the two services of a
//       declared link, both inside the same zone, on the link's port/protocol.
class PolicyDecider {
 public:
  // Throws InvalidPolicyError for policies with violations.
  explicit PolicyDecider(IsolationPolicy policy);

  Decision Decide(const FlowQuery& flow) const;

  const IsolationPolicy& policy() const { return policy_; }
  const std::vector<Endpoint>& endpoints() const { return endpoints_; }
  // The endpoint owning `ip`, if any.
  const Endpoint* EndpointAt(const IpAddress& ip) const;

 private:
  bool IngressAllows(const FlowQuery& flow) const;
  bool AirlockAllows(const FlowQuery& flow) const;
  bool LinkAllows(const FlowQuery& flow) const;

  IsolationPolicy policy_;
  std::vector<Endpoint> endpoints_;
  std::set<std::tuple<std::string, std::string, int, Protocol>> links_;
};

Decision DecideByPolicy(const IsolationPolicy& policy, const FlowQuery& flow);

struct EgressTuple {
  std::string service;
  IpAddress dst_ip;
  int dst_port = 0;
  Protocol proto = Protocol::kTcp;

  friend auto operator<=>(const EgressTuple&, const EgressTuple&) = default;
};

// Every new-state flow from a service endpoint to an address outside all zone
// subnets that the policy allows. Each allowing clause names an exact
// destination, so checking every named destination from every endpoint is
// complete.
std::set<EgressTuple> EnumerateAllowedEgress(const IsolationPolicy& policy);

// Well-known public addresses used as "the internet" by probes.
const std::vector<IpAddress>& PublicProbeTargets();

// Differential sweep universe for one policy:
//   sources  every endpoint, plus for each ingress rule one address inside
//            its CIDR and one outside every ingress CIDR (external endpoints)
//   dsts     each zone subnet's .10 host, every endpoint address, each airlock
//            pin and pin+-1, 8.8.8.8, 1.1.1.1
//   ports    80, 443, 636, 8000, 8080, 3389 and every port the policy names
//            (airlock ports +-1 included)
//   protos   tcp/udp with each port, icmp without
//   states   new and established
std::vector<FlowQuery> FlowUniverse(const IsolationPolicy& policy);

}  // namespace warden

#endif  // WARDEN_FLOW_H_
