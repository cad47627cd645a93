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

#ifndef WARDEN_HARNESS_H_
#define WARDEN_HARNESS_H_

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "warden/flow.h"
#include "warden/hardening.h"
#include "warden/policy.h"
#include "warden/ruleset.h"

namespace warden {

enum class ProbeCapability { kFlowEval, kRuleDump, kExposureDump, kTlsProbe };
std::string_view ToString(ProbeCapability capability);

class BackendError : public std::runtime_error {
 public:
  explicit BackendError(ProbeCapability capability)
      : std::runtime_error("backend does not support " +
                           std::string(ToString(capability))),
        capability_(capability) {}

  ProbeCapability capability() const { return capability_; }

 private:
  ProbeCapability capability_;
};

// What the battery probes. Every query throws BackendError when the matching
// capability is absent.
class ProbeBackend {
 public:
  virtual ~ProbeBackend() = default;

  virtual std::set<ProbeCapability> capabilities() const = 0;
  // False means the harness must issue queries from one thread.
  virtual bool concurrent_queries() const { return false; }

  virtual Verdict Probe(const FlowQuery& flow) const = 0;
  virtual FirewallRuleSet DumpRules() const = 0;
  virtual std::vector<ObservedService> DumpExposure() const = 0;
  virtual TlsNegotiation Handshake(const TlsOffer& offer) const = 0;

  bool Supports(ProbeCapability c) const { return capabilities().contains(c); }
};

// In-process model of a deployment: flows are evaluated against a ruleset,
// exposure and the TLS endpoint are plain values. Starts out as the faithful
// deployment of `policy`; the setters inject deviations.
class SimulatedBackend : public ProbeBackend {
 public:
  explicit SimulatedBackend(const IsolationPolicy& policy);

  SimulatedBackend& set_ruleset(FirewallRuleSet ruleset);
  SimulatedBackend& set_exposure(std::vector<ObservedService> exposure);
  SimulatedBackend& set_tls_floor(TlsVersion floor);
  SimulatedBackend& drop_capability(ProbeCapability capability);

  const FirewallRuleSet& ruleset() const { return ruleset_; }
  const std::vector<ObservedService>& exposure() const { return exposure_; }

  std::set<ProbeCapability> capabilities() const override { return capabilities_; }
  bool concurrent_queries() const override { return true; }
  Verdict Probe(const FlowQuery& flow) const override;
  FirewallRuleSet DumpRules() const override;
  std::vector<ObservedService> DumpExposure() const override;
  TlsNegotiation Handshake(const TlsOffer& offer) const override;

 private:
  void Require(ProbeCapability capability) const;

  FirewallRuleSet ruleset_;
  std::vector<ObservedService> exposure_;
  TlsVersion tls_floor_;
  std::set<ProbeCapability> capabilities_;
};

// Placeholder for probing real containers and the host firewall. Advertises
// no capabilities, so every backend-dependent test is skipped.
class LiveProbeBackend : public ProbeBackend {
 public:
  std::set<ProbeCapability> capabilities() const override { return {}; }
  Verdict Probe(const FlowQuery& flow) const override;
  FirewallRuleSet DumpRules() const override;
  std::vector<ObservedService> DumpExposure() const override;
  TlsNegotiation Handshake(const TlsOffer& offer) const override;
};

enum class TestStatus { kPass, kFail, kSkipped };
std::string_view ToString(TestStatus status);

struct TestResult {
  std::string id;  // "T1" .. "T7"
  std::string name;
  TestStatus status = TestStatus::kSkipped;
  std::string details;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

struct StatusCounts {
  int pass = 0;
  int fail = 0;
  int skipped = 0;
};

struct TestReport {
  std::vector<TestResult> battery;  // T1..T7, in order

  StatusCounts Summary() const;
  const TestResult& Get(std::string_view id) const;
  friend bool operator==(const TestReport&, const TestReport&) = default;
};

struct ScenarioResult {
  std::string id;  // "S1" .. "S5"
  std::string name;
  double attack_flows_blocked = 1.0;  // 1.0 when the scenario probes no flows
  std::vector<std::string> mitigations_verified;
  TestStatus status = TestStatus::kSkipped;
  std::string details;

  friend bool operator==(const ScenarioResult&, const ScenarioResult&) = default;
};

struct ThreatReport {
  std::vector<ScenarioResult> scenarios;  // S1..S5, in order

  StatusCounts Summary() const;
  const ScenarioResult& Get(std::string_view id) const;
  friend bool operator==(const ThreatReport&, const ThreatReport&) = default;
};

// The automated control battery:
//   T1  ICMP to public targets is blocked from every endpoint
//   T2  HTTPS (tcp/443) to public targets is blocked from every endpoint
//   T3  installed rules equal Compile(policy); each airlock pin is reachable
//       and pin +-1 (address and port) is not
//   T4  ingress allow-list sources reach the ingress service, other sources
//       and undeclared ports do not
//   T5  the TLS endpoint negotiates exactly like NegotiateTls for every
//       offer, and the policy minimum is not below TLS 1.2
//   T6  observed attachments and host ports equal the declaration
//   T7  a monitor emits kill directives for forbidden egress and for rule
//       drift that opens egress
// A test whose capability is missing is Skipped. Throws InvalidPolicyError.
TestReport RunBattery(const IsolationPolicy& policy, const ProbeBackend& backend);

// Assume-breach scenarios:
//   S1  malicious model weights: internal services cannot reach public targets
//   S2  supply-chain implant: beacons from every service are blocked and the
//       monitor classifies them as forbidden
//   S3  auth-bridge compromise: airlock services reach nothing but their pins;
//       upstream TLS verification is required on every airlock
//   S4  web-application compromise: no service reaches public targets, no
//       retained capabilities or privileged containers
//   S5  credential theft: no secret on a persistent or writable-layer path
ThreatReport RunThreatSuite(const IsolationPolicy& policy,
                            const ProbeBackend& backend);

nlohmann::json TestReportToJson(const TestReport& report);
nlohmann::json ThreatReportToJson(const ThreatReport& report);

// Single-fault injections used to show the battery has no false passes.
enum class Mutation {
  kRemoveDenyAll,
  kWidenAirlock,
  kAddPublicAccept,
  kRetainCapability,
  kLowerTlsFloor,
  kAddUndeclaredPort,
};
std::string_view ToString(Mutation mutation);
const std::vector<Mutation>& AllMutations();

struct MutatedDeployment {
  IsolationPolicy policy;
  SimulatedBackend backend;
};

// Applies one mutation to the faithful deployment of `policy`. Deployment
// faults (rules, exposure, TLS endpoint) land on the backend; configuration
// faults (capabilities) land on the policy. kWidenAirlock needs an airlock and
// kRetainCapability/kAddUndeclaredPort a service, kLowerTlsFloor a minimum
// above TLS 1.0; throws std::invalid_argument otherwise.
MutatedDeployment ApplyMutation(const IsolationPolicy& policy, Mutation mutation);

}  // namespace warden

#endif  // WARDEN_HARNESS_H_
