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

#ifndef WARDEN_RULESET_H_
#define WARDEN_RULESET_H_

#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "warden/ip.h"
#include "warden/policy.h"

namespace warden {

enum class StateMatch { kNew, kEstablishedRelated, kAny };
enum class RuleAction { kAccept, kDeny };

// One entry of the forward chain. Unset src/dst/dest_port match anything.
struct FirewallRule {
  std::string id;
  int priority = 0;
  std::optional<Cidr> src;
  std::optional<Cidr> dst;
  Protocol proto = Protocol::kAny;
  std::optional<int> dest_port;
  StateMatch state = StateMatch::kAny;
  RuleAction action = RuleAction::kDeny;

  // Identity used for diffing: every field except id and priority.
  using KeyType = std::tuple<std::optional<Cidr>, std::optional<Cidr>, Protocol,
                             std::optional<int>, StateMatch, RuleAction>;
  KeyType Key() const { return {src, dst, proto, dest_port, state, action}; }
  bool IsCatchAllDeny() const;

  friend bool operator==(const FirewallRule&, const FirewallRule&) = default;
};

struct FirewallRuleSet {
  std::vector<FirewallRule> rules;
  std::string policy_hash;

  friend bool operator==(const FirewallRuleSet&, const FirewallRuleSet&) = default;
};

// Id derived from the rule's match fields; the rendered text carries no ids,
// so compile and parse both name rules with this. "deny-all" and
// "established" name the two fixed bands.
std::string RuleIdFor(const FirewallRule& rule);

// Compiles a validated policy into the forward chain:
//   band 1  established/related accept
//   band 2  ingress allow-list accepts
//   band 3  airlock pins (egress subnet -> exact target, port, proto)
//   band 4  service links (endpoint -> endpoint inside each shared zone)
//   band 5  catch-all deny
// Bands 2-4 are sorted by (owning service name, rule fields); rules whose match
// fields repeat an earlier rule are dropped. Priorities are 10, 20, ...
// Throws InvalidPolicyError when ValidatePolicy reports anything.
FirewallRuleSet Compile(const IsolationPolicy& policy);

// Throws InvalidRulesetError unless the set is non-empty, ids are unique,
// priorities strictly increase and the last rule is the catch-all deny.
void CheckRulesetWellFormed(const FirewallRuleSet& ruleset);

std::string RenderRule(const FirewallRule& rule);
// Header line plus one line per rule. Throws InvalidRulesetError.
std::string RenderRuleset(const FirewallRuleSet& ruleset);

// Inverse of RenderRuleset. Only the line grammar is enforced, so dumps that
// lost their catch-all still parse (drift detection needs them). Throws
// SyntaxError with the offending line.
FirewallRuleSet ParseRuleset(std::string_view text);

struct RuleDiff {
  std::vector<FirewallRule> missing;     // in expected, not in observed
  std::vector<FirewallRule> unexpected;  // in observed, not in expected
  // Expected-side ids (a, b): a precedes b in expected, follows it in observed.
  std::vector<std::pair<std::string, std::string>> reordered;

  bool empty() const {
    return missing.empty() && unexpected.empty() && reordered.empty();
  }
  friend bool operator==(const RuleDiff&, const RuleDiff&) = default;
};

// Multiset comparison on FirewallRule::Key(), plus pairwise order inversions
// among the rules both sides share (first occurrences).
RuleDiff DiffRulesets(const FirewallRuleSet& expected,
                      const FirewallRuleSet& observed);

std::string_view ToString(StateMatch state);
std::string_view ToString(RuleAction action);

}  // namespace warden

#endif  // WARDEN_RULESET_H_
