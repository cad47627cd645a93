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

#include "warden/harness.h"

#include <algorithm>
#include <functional>
#include <future>
#include <sstream>

#include "warden/monitor.h"
#include "warden/validate.h"

namespace warden {
namespace {

using nlohmann::json;

// Accumulates probe outcomes for one test or scenario.
class Tally {
 public:
  void Expect(const FlowQuery& flow, Decision expected, Decision observed) {
    ++total_;
    if (expected == observed) return;
    ++mismatches_;
    if (examples_.size() < 3) {
      examples_.push_back(flow.ToString() + " expected " +
                          std::string(ToString(expected)) + " got " +
                          std::string(ToString(observed)));
    }
  }

  int total() const { return total_; }
  int mismatches() const { return mismatches_; }
  bool ok() const { return mismatches_ == 0; }
  double fraction_ok() const {
    return total_ == 0 ? 1.0 : static_cast<double>(total_ - mismatches_) / total_;
  }

  std::string Describe(std::string_view what) const {
    std::string out = std::to_string(total_ - mismatches_) + "/" +
                      std::to_string(total_) + " " + std::string(what);
    for (const std::string& e : examples_) out += "; " + e;
    return out;
  }

 private:
  int total_ = 0;
  int mismatches_ = 0;
  std::vector<std::string> examples_;
};

TestResult Skipped(TestResult r, const BackendError& e) {
  r.status = TestStatus::kSkipped;
  r.details = e.what();
  return r;
}

TestStatus PassIf(bool ok) { return ok ? TestStatus::kPass : TestStatus::kFail; }

// Runs `body`, turning a missing backend capability into Skipped.
TestResult Guard(std::string id, std::string name,
                 const std::function<void(TestResult&)>& body) {
  TestResult r{std::move(id), std::move(name), TestStatus::kSkipped, ""};
  try {
    body(r);
  } catch (const BackendError& e) {
    return Skipped(std::move(r), e);
  }
  return r;
}

// Public-target probes from every given endpoint; all must be denied.
void ProbePublic(const ProbeBackend& backend, const std::vector<Endpoint>& sources,
                 const std::vector<std::pair<Protocol, std::optional<int>>>& kinds,
                 Tally& tally) {
  for (const Endpoint& src : sources) {
    for (const IpAddress& dst : PublicProbeTargets()) {
      for (const auto& [proto, port] : kinds) {
        FlowQuery flow{src, dst, port, proto, FlowState::kNew};
        tally.Expect(flow, Decision::kDeny, backend.Probe(flow).decision);
      }
    }
  }
}

std::string DiffText(const RuleDiff& diff) {
  std::ostringstream out;
  out << "rule diff: missing=" << diff.missing.size()
      << " unexpected=" << diff.unexpected.size()
      << " reordered=" << diff.reordered.size();
  for (const FirewallRule& r : diff.missing) out << "; missing " << RenderRule(r);
  for (const FirewallRule& r : diff.unexpected) out << "; unexpected " << RenderRule(r);
  return out.str();
}

// Near misses around an airlock pin: address +-1, port +-1, other transport.
std::vector<FlowQuery> NearMisses(const Airlock& a, const Endpoint& src) {
  std::vector<FlowQuery> out;
  for (int d : {-1, 1}) {
    if (auto ip = a.target_ip.Offset(d)) {
      out.push_back({src, *ip, a.target_port, a.proto, FlowState::kNew});
    }
    const int port = a.target_port + d;
    if (port >= 1 && port <= 65535) {
      out.push_back({src, a.target_ip, port, a.proto, FlowState::kNew});
    }
  }
  out.push_back({src, a.target_ip, a.target_port,
                 a.proto == Protocol::kTcp ? Protocol::kUdp : Protocol::kTcp,
                 FlowState::kNew});
  return out;
}

TestResult RunT1(const std::vector<Endpoint>& endpoints, const ProbeBackend& backend) {
  return Guard("T1", "public ICMP blocked", [&](TestResult& r) {
    Tally tally;
    ProbePublic(backend, endpoints, {{Protocol::kIcmp, std::nullopt}}, tally);
    r.status = PassIf(tally.ok());
    r.details = tally.Describe("ICMP probes to public targets blocked");
  });
}

TestResult RunT2(const std::vector<Endpoint>& endpoints, const ProbeBackend& backend) {
  return Guard("T2", "public HTTPS blocked", [&](TestResult& r) {
    Tally tally;
    ProbePublic(backend, endpoints, {{Protocol::kTcp, 443}}, tally);
    r.status = PassIf(tally.ok());
    r.details = tally.Describe("HTTPS probes to public targets blocked");
  });
}

TestResult RunT3(const PolicyDecider& decider, const FirewallRuleSet& expected,
                 const ProbeBackend& backend) {
  return Guard("T3", "exact firewall rules and airlock pins", [&](TestResult& r) {
    const RuleDiff diff = DiffRulesets(expected, backend.DumpRules());
    Tally tally;
    for (const Airlock& a : decider.policy().airlocks) {
      const Endpoint src = *FindEndpoint(decider.endpoints(), a.from_service, a.via_zone);
      FlowQuery pin{src, a.target_ip, a.target_port, a.proto, FlowState::kNew};
      tally.Expect(pin, Decision::kAllow, backend.Probe(pin).decision);
      for (const FlowQuery& miss : NearMisses(a, src)) {
        tally.Expect(miss, decider.Decide(miss), backend.Probe(miss).decision);
      }
    }
    r.status = PassIf(diff.empty() && tally.ok());
    r.details = (diff.empty() ? std::string("installed rules match compiled rules")
                              : DiffText(diff)) +
                "; " + tally.Describe("airlock pin probes as expected");
  });
}

TestResult RunT4(const PolicyDecider& decider, const ProbeBackend& backend) {
  return Guard("T4", "ingress allow-list and default deny", [&](TestResult& r) {
    const IsolationPolicy& policy = decider.policy();
    const Zone* dmz = nullptr;
    for (const Zone& z : policy.zones) {
      if (z.kind == ZoneKind::kIngressDmz) dmz = &z;
    }
    if (dmz == nullptr) {
      r.status = TestStatus::kPass;
      r.details = "no ingress DMZ declared; nothing is exposed";
      return;
    }

    std::optional<IpAddress> outsider;
    for (const char* text : {"203.0.113.7", "198.51.100.7", "192.0.2.7", "100.64.0.7"}) {
      const IpAddress ip = *IpAddress::Parse(text);
      const bool covered =
          std::any_of(policy.ingress.begin(), policy.ingress.end(),
                      [&](const IngressRule& g) { return g.source.Contains(ip); });
      if (!covered) {
        outsider = ip;
        break;
      }
    }

    Tally tally;
    auto probe = [&](const IpAddress& from, const Endpoint& to, int port, Protocol proto) {
      FlowQuery flow{{"", from, ""}, to.ip, port, proto, FlowState::kNew};
      tally.Expect(flow, decider.Decide(flow), backend.Probe(flow).decision);
    };
    int allowed_sources = 0;
    for (const IngressRule& g : policy.ingress) {
      const Endpoint to = *FindEndpoint(decider.endpoints(), g.to_service, dmz->name);
      const IpAddress inside =
          g.source.HostAt(g.source.is_host() ? 0 : 1).value_or(g.source.network());
      FlowQuery allowed{{"", inside, ""}, to.ip, g.dest_port, g.proto, FlowState::kNew};
      tally.Expect(allowed, Decision::kAllow, backend.Probe(allowed).decision);
      ++allowed_sources;
      if (outsider) probe(*outsider, to, g.dest_port, g.proto);
      // An undeclared port on the same service.
      for (int port : {22, 8081, 65000}) {
        const bool declared = std::any_of(
            policy.ingress.begin(), policy.ingress.end(), [&](const IngressRule& o) {
              return o.to_service == g.to_service && o.dest_port == port;
            });
        if (!declared) {
          probe(inside, to, port, g.proto);
          break;
        }
      }
    }
    // Services in the DMZ without any ingress rule stay closed.
    for (const Endpoint& ep : decider.endpoints()) {
      if (ep.zone != dmz->name) continue;
      const ServiceSpec* spec = policy.FindService(ep.service);
      for (const PortBinding& p : spec->published_ports) {
        if (outsider) probe(*outsider, ep, p.port, p.proto);
      }
    }
    r.status = PassIf(tally.ok());
    r.details = std::to_string(allowed_sources) + " allow-listed sources; " +
                tally.Describe("ingress probes as expected");
  });
}

TestResult RunT5(const IsolationPolicy& policy, const ProbeBackend& backend) {
  return Guard("T5", "TLS minimum version negotiation", [&](TestResult& r) {
    int total = 0;
    int mismatches = 0;
    std::string first;
    constexpr TlsVersion kAll[] = {TlsVersion::kTls10, TlsVersion::kTls11,
                                   TlsVersion::kTls12, TlsVersion::kTls13};
    for (TlsVersion lo : kAll) {
      for (TlsVersion hi : kAll) {
        if (hi < lo) continue;
        const TlsOffer offer{lo, hi};
        const TlsNegotiation want = NegotiateTls(policy.tls.min_version, offer);
        const TlsNegotiation got = backend.Handshake(offer);
        ++total;
        if (want != got) {
          ++mismatches;
          if (first.empty()) {
            first = "offer [" + std::string(ToString(lo)) + "," +
                    std::string(ToString(hi)) + "] got " +
                    (got ? std::string(ToString(*got)) : "rejected") + ", expected " +
                    (want ? std::string(ToString(*want)) : "rejected");
          }
        }
      }
    }
    const auto findings = CheckHardening(policy);
    const bool floor_ok = std::none_of(findings.begin(), findings.end(), [](const Finding& f) {
      return f.code == finding::kTlsBelowMin;
    });
    r.status = PassIf(mismatches == 0 && floor_ok);
    r.details = std::to_string(total - mismatches) + "/" + std::to_string(total) +
                " offers negotiated as expected with minimum " +
                std::string(ToString(policy.tls.min_version));
    if (!first.empty()) r.details += "; " + first;
    if (!floor_ok) r.details += "; policy minimum is below TLS 1.2";
  });
}

TestResult RunT6(const IsolationPolicy& policy, const ProbeBackend& backend) {
  return Guard("T6", "network attachments and host port exposure", [&](TestResult& r) {
    const auto findings = CheckExposure(policy, backend.DumpExposure());
    r.status = PassIf(findings.empty());
    if (findings.empty()) {
      r.details = "attachments and published ports match for " +
                  std::to_string(policy.services.size()) + " services";
      return;
    }
    r.details = std::to_string(findings.size()) + " exposure findings";
    for (const Finding& f : findings) r.details += "; " + f.code + " " + f.service;
  });
}

TestResult RunT7(const PolicyDecider& decider, const FirewallRuleSet& expected) {
  TestResult r{"T7", "fail-safe kill switch", TestStatus::kFail, ""};
  IsolationMonitor monitor(decider.policy(), MonitorMode::kStrict);
  ConnectionEvent beacon;
  beacon.dst_ip = PublicProbeTargets()[0];
  beacon.dst_port = 443;
  beacon.proto = Protocol::kTcp;
  std::optional<std::string> target;
  if (!decider.endpoints().empty()) {
    const Endpoint& src = decider.endpoints().front();
    beacon.src_service = src.service;
    beacon.src_ip = src.ip;
    target = src.service;
  } else {
    beacon.src_ip = *IpAddress::Parse("192.0.2.1");
  }
  monitor.Ingest(beacon);
  const MonitorState state = monitor.Snapshot();
  const bool event_kill = state.directives.size() == 1 &&
                          state.directives[0].target_service == target &&
                          state.directives[0].stream_position == 0u &&
                          !state.directives[0].advisory;

  FirewallRuleSet drifted = expected;
  FirewallRule leak;
  leak.dst = Cidr::Host(PublicProbeTargets()[0]);
  leak.proto = Protocol::kTcp;
  leak.dest_port = 443;
  leak.state = StateMatch::kNew;
  leak.action = RuleAction::kAccept;
  leak.id = RuleIdFor(leak);
  drifted.rules.insert(drifted.rules.begin() + 1, leak);
  const DriftCheck nominal = CheckRuleDrift(decider.policy(), expected);
  const DriftCheck drift = CheckRuleDrift(decider.policy(), drifted);
  const bool drift_kill = !nominal.directive && drift.directive &&
                          drift.directive->reason_class == KillReason::kRuleDrift &&
                          !drift.directive->target_service;

  r.status = PassIf(event_kill && drift_kill);
  r.details = std::string("forbidden egress ") +
              (event_kill ? "raised a kill directive" : "did NOT raise a kill directive") +
              "; rule drift " + (drift_kill ? "raised" : "did NOT raise") +
              " RULE_DRIFT";
  return r;
}

ScenarioResult Scenario(std::string id, std::string name, const Tally* tally,
                        std::vector<std::pair<std::string, bool>> mitigations,
                        std::string details) {
  ScenarioResult s;
  s.id = std::move(id);
  s.name = std::move(name);
  s.attack_flows_blocked = tally ? tally->fraction_ok() : 1.0;
  bool all = true;
  for (auto& [mitigation, held] : mitigations) {
    if (held) s.mitigations_verified.push_back(mitigation);
    all = all && held;
  }
  s.status = PassIf(all);
  s.details = std::move(details);
  return s;
}

ScenarioResult SkippedScenario(std::string id, std::string name, const BackendError& e) {
  ScenarioResult s;
  s.id = std::move(id);
  s.name = std::move(name);
  s.attack_flows_blocked = 0.0;
  s.status = TestStatus::kSkipped;
  s.details = e.what();
  return s;
}

template <typename Fn>
ScenarioResult GuardScenario(const char* id, const char* name, Fn body) {
  try {
    return body();
  } catch (const BackendError& e) {
    return SkippedScenario(id, name, e);
  }
}

std::vector<Endpoint> EndpointsOf(const std::vector<Endpoint>& all,
                                  const std::function<bool(const Endpoint&)>& keep) {
  std::vector<Endpoint> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), keep);
  return out;
}

}  // namespace

std::string_view ToString(ProbeCapability capability) {
  switch (capability) {
    case ProbeCapability::kFlowEval: return "FlowEval";
    case ProbeCapability::kRuleDump: return "RuleDump";
    case ProbeCapability::kExposureDump: return "ExposureDump";
    case ProbeCapability::kTlsProbe: return "TlsProbe";
  }
  return "?";
}

std::string_view ToString(TestStatus status) {
  switch (status) {
    case TestStatus::kPass: return "pass";
    case TestStatus::kFail: return "fail";
    case TestStatus::kSkipped: return "skipped";
  }
  return "?";
}

SimulatedBackend::SimulatedBackend(const IsolationPolicy& policy)
    : ruleset_(Compile(policy)),
      exposure_(DeclaredExposure(policy)),
      tls_floor_(policy.tls.min_version),
      capabilities_{ProbeCapability::kFlowEval, ProbeCapability::kRuleDump,
                    ProbeCapability::kExposureDump, ProbeCapability::kTlsProbe} {}

SimulatedBackend& SimulatedBackend::set_ruleset(FirewallRuleSet ruleset) {
  ruleset_ = std::move(ruleset);
  return *this;
}

SimulatedBackend& SimulatedBackend::set_exposure(std::vector<ObservedService> exposure) {
  exposure_ = std::move(exposure);
  return *this;
}

SimulatedBackend& SimulatedBackend::set_tls_floor(TlsVersion floor) {
  tls_floor_ = floor;
  return *this;
}

SimulatedBackend& SimulatedBackend::drop_capability(ProbeCapability capability) {
  capabilities_.erase(capability);
  return *this;
}

void SimulatedBackend::Require(ProbeCapability capability) const {
  if (!capabilities_.contains(capability)) throw BackendError(capability);
}

Verdict SimulatedBackend::Probe(const FlowQuery& flow) const {
  Require(ProbeCapability::kFlowEval);
  return EvaluateFlow(ruleset_, flow);
}

FirewallRuleSet SimulatedBackend::DumpRules() const {
  Require(ProbeCapability::kRuleDump);
  return ruleset_;
}

std::vector<ObservedService> SimulatedBackend::DumpExposure() const {
  Require(ProbeCapability::kExposureDump);
  return exposure_;
}

TlsNegotiation SimulatedBackend::Handshake(const TlsOffer& offer) const {
  Require(ProbeCapability::kTlsProbe);
  return NegotiateTls(tls_floor_, offer);
}

Verdict LiveProbeBackend::Probe(const FlowQuery&) const {
  throw BackendError(ProbeCapability::kFlowEval);
}
FirewallRuleSet LiveProbeBackend::DumpRules() const {
  throw BackendError(ProbeCapability::kRuleDump);
}
std::vector<ObservedService> LiveProbeBackend::DumpExposure() const {
  throw BackendError(ProbeCapability::kExposureDump);
}
TlsNegotiation LiveProbeBackend::Handshake(const TlsOffer&) const {
  throw BackendError(ProbeCapability::kTlsProbe);
}

StatusCounts TestReport::Summary() const {
  StatusCounts c;
  for (const TestResult& r : battery) {
    (r.status == TestStatus::kPass ? c.pass
                                   : r.status == TestStatus::kFail ? c.fail : c.skipped)++;
  }
  return c;
}

const TestResult& TestReport::Get(std::string_view id) const {
  for (const TestResult& r : battery) {
    if (r.id == id) return r;
  }
  throw std::out_of_range("no test " + std::string(id));
}

StatusCounts ThreatReport::Summary() const {
  StatusCounts c;
  for (const ScenarioResult& s : scenarios) {
    (s.status == TestStatus::kPass ? c.pass
                                   : s.status == TestStatus::kFail ? c.fail : c.skipped)++;
  }
  return c;
}

const ScenarioResult& ThreatReport::Get(std::string_view id) const {
  for (const ScenarioResult& s : scenarios) {
    if (s.id == id) return s;
  }
  throw std::out_of_range("no scenario " + std::string(id));
}

TestReport RunBattery(const IsolationPolicy& policy, const ProbeBackend& backend) {
  const PolicyDecider decider(policy);
  const FirewallRuleSet expected = Compile(policy);
  const std::vector<Endpoint>& endpoints = decider.endpoints();

  std::vector<std::function<TestResult()>> tests = {
      [&] { return RunT1(endpoints, backend); },
      [&] { return RunT2(endpoints, backend); },
      [&] { return RunT3(decider, expected, backend); },
      [&] { return RunT4(decider, backend); },
      [&] { return RunT5(policy, backend); },
      [&] { return RunT6(policy, backend); },
      [&] { return RunT7(decider, expected); },
  };

  TestReport report;
  if (backend.concurrent_queries()) {
    std::vector<std::future<TestResult>> pending;
    for (auto& test : tests) pending.push_back(std::async(std::launch::async, test));
    for (auto& f : pending) report.battery.push_back(f.get());
  } else {
    for (auto& test : tests) report.battery.push_back(test());
  }
  return report;
}

ThreatReport RunThreatSuite(const IsolationPolicy& policy, const ProbeBackend& backend) {
  const PolicyDecider decider(policy);
  const std::vector<Endpoint>& endpoints = decider.endpoints();
  const std::vector<Finding> hardening = CheckHardening(policy);
  auto has_finding = [&](std::string_view code) {
    return std::any_of(hardening.begin(), hardening.end(),
                       [&](const Finding& f) { return f.code == code; });
  };
  const Zone* internal = nullptr;
  for (const Zone& z : policy.zones) {
    if (z.kind == ZoneKind::kInternal) internal = &z;
  }

  ThreatReport report;

  report.scenarios.push_back(GuardScenario("S1", "malicious model weights", [&] {
    std::set<std::string> internal_services;
    for (const Endpoint& ep : endpoints) {
      if (ep.zone == internal->name) internal_services.insert(ep.service);
    }
    Tally tally;
    for (const Endpoint& src : EndpointsOf(endpoints, [&](const Endpoint& ep) {
           return internal_services.contains(ep.service);
         })) {
      for (const auto& [dst, proto, port] :
           {std::tuple{PublicProbeTargets()[0], Protocol::kTcp, std::optional<int>(443)},
            std::tuple{PublicProbeTargets()[1], Protocol::kTcp, std::optional<int>(80)},
            std::tuple{PublicProbeTargets()[2], Protocol::kIcmp, std::optional<int>()}}) {
        FlowQuery flow{src, dst, port, proto, FlowState::kNew};
        tally.Expect(flow, Decision::kDeny, backend.Probe(flow).decision);
      }
    }
    return Scenario("S1", "malicious model weights", &tally,
                    {{"internal_network_isolation", !internal->routed_gateway},
                     {"host_egress_filtering", tally.ok()}},
                    tally.Describe("exfiltration flows from internal services blocked"));
  }));

  report.scenarios.push_back(GuardScenario("S2", "supply-chain implant", [&] {
    Tally tally;
    std::vector<ConnectionEvent> beacons;
    ProbePublic(backend, endpoints,
                {{Protocol::kTcp, 443}, {Protocol::kTcp, 80}, {Protocol::kUdp, 53}}, tally);
    for (const Endpoint& src : endpoints) {
      for (const IpAddress& dst : PublicProbeTargets()) {
        ConnectionEvent e;
        e.ts = static_cast<int64_t>(beacons.size());
        e.src_service = src.service;
        e.src_ip = src.ip;
        e.dst_ip = dst;
        e.dst_port = 443;
        beacons.push_back(e);
      }
    }
    IsolationMonitor monitor(policy, MonitorMode::kStrict);
    for (const ConnectionEvent& e : beacons) monitor.Ingest(e);
    const MonitorState state = monitor.Snapshot();
    const bool monitored = state.forbidden == beacons.size() &&
                           (beacons.empty() || !state.directives.empty());
    return Scenario("S2", "supply-chain implant", &tally,
                    {{"host_firewalling", tally.ok()},
                     {"active_isolation_monitoring", monitored}},
                    tally.Describe("beacons blocked") + "; monitor flagged " +
                        std::to_string(state.forbidden) + "/" +
                        std::to_string(beacons.size()) + " beacons as forbidden");
  }));

  report.scenarios.push_back(GuardScenario("S3", "auth-bridge compromise", [&] {
    if (policy.airlocks.empty()) {
      return Scenario("S3", "auth-bridge compromise", nullptr, {},
                      "no airlocks declared");
    }
    Tally tally;
    bool tls_verified = true;
    for (const Airlock& a : policy.airlocks) {
      tls_verified = tls_verified && a.require_upstream_tls_verification;
      const Endpoint via = *FindEndpoint(endpoints, a.from_service, a.via_zone);
      std::vector<FlowQuery> attacks = NearMisses(a, via);
      // The pin itself from the service's other interfaces.
      for (const Endpoint& ep : endpoints) {
        if (ep.service == a.from_service && ep.zone != a.via_zone) {
          attacks.push_back({ep, a.target_ip, a.target_port, a.proto, FlowState::kNew});
        }
      }
      for (const FlowQuery& flow : attacks) {
        if (decider.Decide(flow) == Decision::kAllow) continue;  // another pin
        tally.Expect(flow, Decision::kDeny, backend.Probe(flow).decision);
      }
    }
    return Scenario("S3", "auth-bridge compromise", &tally,
                    {{"dedicated_egress_proxy", true},
                     {"ip_pinning", tally.ok()},
                     {"upstream_tls_verification", tls_verified}},
                    tally.Describe("off-pin airlock flows blocked") +
                        (tls_verified ? "" : "; an airlock skips upstream TLS verification"));
  }));

  report.scenarios.push_back(GuardScenario("S4", "web-application compromise", [&] {
    Tally tally;
    ProbePublic(backend, endpoints,
                {{Protocol::kTcp, 443}, {Protocol::kTcp, 80}, {Protocol::kIcmp, std::nullopt}},
                tally);
    const bool caps_dropped =
        !has_finding(finding::kCapRetained) && !has_finding(finding::kPrivileged);
    return Scenario("S4", "web-application compromise", &tally,
                    {{"capability_drop", caps_dropped},
                     {"host_egress_restrictions", tally.ok()}},
                    tally.Describe("post-compromise egress flows blocked") +
                        (caps_dropped ? "" : "; capabilities retained or privileged"));
  }));

  report.scenarios.push_back([&] {
    const bool secrets_safe = !has_finding(finding::kSecretOnPersistentPath);
    const bool mounts_tight = !has_finding(finding::kWritablePersistentMount);
    ScenarioResult s =
        Scenario("S5", "credential theft", nullptr,
                 {{"in_memory_secret_injection", secrets_safe}},
                 secrets_safe ? "no secret on a persistent or writable-layer path"
                              : "a secret is stored on a persistent path");
    if (mounts_tight) {
      s.mitigations_verified.push_back("read_only_mounts");
    } else {
      s.details += "; a writable persistent mount encloses a secret path";
    }
    return s;
  }());

  return report;
}

json TestReportToJson(const TestReport& report) {
  json battery = json::array();
  for (const TestResult& r : report.battery) {
    battery.push_back({{"id", r.id},
                       {"name", r.name},
                       {"status", ToString(r.status)},
                       {"details", r.details}});
  }
  const StatusCounts c = report.Summary();
  return {{"battery", std::move(battery)},
          {"summary", {{"pass", c.pass}, {"fail", c.fail}, {"skipped", c.skipped}}}};
}

json ThreatReportToJson(const ThreatReport& report) {
  json scenarios = json::array();
  for (const ScenarioResult& s : report.scenarios) {
    scenarios.push_back({{"id", s.id},
                         {"name", s.name},
                         {"status", ToString(s.status)},
                         {"attack_flows_blocked", s.attack_flows_blocked},
                         {"mitigations_verified", s.mitigations_verified},
                         {"details", s.details}});
  }
  const StatusCounts c = report.Summary();
  return {{"scenarios", std::move(scenarios)},
          {"summary", {{"pass", c.pass}, {"fail", c.fail}, {"skipped", c.skipped}}}};
}

std::string_view ToString(Mutation mutation) {
  switch (mutation) {
    case Mutation::kRemoveDenyAll: return "remove-deny-all";
    case Mutation::kWidenAirlock: return "widen-airlock";
    case Mutation::kAddPublicAccept: return "add-public-accept";
    case Mutation::kRetainCapability: return "retain-capability";
    case Mutation::kLowerTlsFloor: return "lower-tls-floor";
    case Mutation::kAddUndeclaredPort: return "add-undeclared-port";
  }
  return "?";
}

const std::vector<Mutation>& AllMutations() {
  static const std::vector<Mutation> kAll = {
      Mutation::kRemoveDenyAll,    Mutation::kWidenAirlock,
      Mutation::kAddPublicAccept,  Mutation::kRetainCapability,
      Mutation::kLowerTlsFloor,    Mutation::kAddUndeclaredPort,
  };
  return kAll;
}

MutatedDeployment ApplyMutation(const IsolationPolicy& policy, Mutation mutation) {
  MutatedDeployment out{policy, SimulatedBackend(policy)};
  FirewallRuleSet rules = out.backend.ruleset();
  auto renumber = [&rules] {
    for (size_t i = 0; i < rules.rules.size(); ++i) {
      rules.rules[i].id = RuleIdFor(rules.rules[i]);
      rules.rules[i].priority = 10 * static_cast<int>(i + 1);
    }
  };

  switch (mutation) {
    case Mutation::kRemoveDenyAll:
      rules.rules.pop_back();
      out.backend.set_ruleset(std::move(rules));
      break;
    case Mutation::kWidenAirlock: {
      if (policy.airlocks.empty()) throw std::invalid_argument("policy has no airlock");
      const Airlock& a = policy.airlocks.front();
      for (FirewallRule& r : rules.rules) {
        if (r.dst == Cidr::Host(a.target_ip) && r.dest_port == a.target_port &&
            r.proto == a.proto) {
          r.dest_port.reset();
        }
      }
      renumber();
      out.backend.set_ruleset(std::move(rules));
      break;
    }
    case Mutation::kAddPublicAccept: {
      FirewallRule leak;
      leak.dst = Cidr::Host(PublicProbeTargets()[0]);
      leak.proto = Protocol::kTcp;
      leak.dest_port = 443;
      leak.state = StateMatch::kNew;
      leak.action = RuleAction::kAccept;
      rules.rules.insert(rules.rules.begin() + 1, leak);
      renumber();
      out.backend.set_ruleset(std::move(rules));
      break;
    }
    case Mutation::kRetainCapability:
      if (out.policy.services.empty()) throw std::invalid_argument("policy has no service");
      out.policy.services.front().hardening.retained_capabilities.insert("NET_ADMIN");
      out.backend = SimulatedBackend(out.policy);
      break;
    case Mutation::kLowerTlsFloor:
      if (policy.tls.min_version == TlsVersion::kTls10) {
        throw std::invalid_argument("policy minimum is already TLS 1.0");
      }
      out.backend.set_tls_floor(TlsVersion::kTls10);
      break;
    case Mutation::kAddUndeclaredPort: {
      std::vector<ObservedService> exposure = out.backend.exposure();
      if (exposure.empty()) throw std::invalid_argument("policy has no service");
      auto& ports = exposure.front().published_ports;
      int port = 8080;
      while (std::find(ports.begin(), ports.end(), PortBinding{port, Protocol::kTcp}) !=
             ports.end()) {
        ++port;
      }
      ports.push_back({port, Protocol::kTcp});
      out.backend.set_exposure(std::move(exposure));
      break;
    }
  }
  return out;
}

}  // namespace warden
