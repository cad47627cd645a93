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

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "warden/error.h"
#include "warden/flow.h"
#include "warden/harness.h"
#include "warden/monitor.h"
#include "warden/policy_io.h"
#include "warden/ruleset.h"
#include "warden/validate.h"

namespace warden::cli {
namespace {

struct Options {
  std::string policy_path;

  std::string out_path;

  std::string src;
  std::string src_zone;
  std::string dst;
  std::optional<int> port;
  std::string proto;
  std::string state = "new";

  std::string backend = "sim";
  bool threats = false;
  bool json = true;

  std::string replay_path;
  std::string mode = "strict";
  std::string metrics_out;
  std::string directives_log;
};

// Usage or input problem: reported on stderr, exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

IsolationPolicy LoadPolicy(const Options& opts) {
  try {
    return ParsePolicy(ReadFile(opts.policy_path));
  } catch (const SyntaxError& e) {
    throw UsageError(opts.policy_path + ": " + e.what());
  }
}

// Prints violations to `sink`; true when the policy is valid.
bool ReportViolations(const IsolationPolicy& policy, std::ostream& sink) {
  const auto violations = ValidatePolicy(policy);
  for (const Violation& v : violations) {
    sink << v.code << " " << v.subject << ": " << v.message << "\n";
  }
  return violations.empty();
}

ExitCode CmdValidate(const Options& opts, std::ostream& out) {
  return ReportViolations(LoadPolicy(opts), out) ? ExitCode::kOk : ExitCode::kFailure;
}

ExitCode CmdCompile(const Options& opts, std::ostream& out, std::ostream& err) {
  const IsolationPolicy policy = LoadPolicy(opts);
  if (!ReportViolations(policy, err)) return ExitCode::kFailure;
  const std::string text = RenderRuleset(Compile(policy));
  if (opts.out_path.empty()) {
    out << text;
  } else {
    WriteFile(opts.out_path, text);
  }
  return ExitCode::kOk;
}

ExitCode CmdExplain(const Options& opts, std::ostream& out, std::ostream& err) {
  const IsolationPolicy policy = LoadPolicy(opts);
  if (!ReportViolations(policy, err)) return ExitCode::kFailure;

  auto dst = IpAddress::Parse(opts.dst);
  if (!dst) throw UsageError("--dst: invalid IP address " + opts.dst);
  auto proto = ParseProtocol(opts.proto);
  if (!proto || *proto == Protocol::kAny) {
    throw UsageError("--proto must be tcp, udp or icmp");
  }
  auto state = ParseFlowState(opts.state);
  if (!state) throw UsageError("--state must be new or established");
  if (policy.FindService(opts.src) == nullptr) {
    throw UsageError("--src: unknown service " + opts.src);
  }

  const PolicyDecider decider(policy);
  std::optional<Endpoint> src;
  if (opts.src_zone.empty()) {
    src = SelectSourceEndpoint(policy, decider.endpoints(), opts.src, *dst);
  } else {
    src = FindEndpoint(decider.endpoints(), opts.src, opts.src_zone);
    if (!src) throw UsageError(opts.src + " is not attached to " + opts.src_zone);
  }

  FlowQuery flow{*src, *dst, opts.port, *proto, *state};
  if (!flow.IsWellFormed()) {
    throw UsageError("--port is required for tcp/udp (1-65535) and not allowed for icmp");
  }

  const Verdict verdict = EvaluateFlow(Compile(policy), flow);
  const Decision by_policy = decider.Decide(flow);
  out << ToString(verdict.decision) << " rule="
      << (verdict.matched_rule_id.empty() ? "none" : verdict.matched_rule_id) << "\n";
  err << "flow: " << flow.ToString() << "\n"
      << "ruleset: " << ToString(verdict.decision) << " (" << verdict.rationale << ")\n"
      << "policy: " << ToString(by_policy) << "\n";
  if (by_policy != verdict.decision) {
    err << "differential alarm: ruleset and policy oracles disagree\n";
    return ExitCode::kFailure;
  }
  return verdict.decision == Decision::kAllow ? ExitCode::kOk : ExitCode::kDeny;
}

void PrintTable(const TestReport& battery, const std::optional<ThreatReport>& threats,
                std::ostream& out) {
  for (const TestResult& r : battery.battery) {
    out << std::left << std::setw(4) << r.id << std::setw(9) << ToString(r.status)
        << r.name << "\n      " << r.details << "\n";
  }
  if (!threats) return;
  for (const ScenarioResult& s : threats->scenarios) {
    out << std::left << std::setw(4) << s.id << std::setw(9) << ToString(s.status)
        << s.name << " (blocked " << s.attack_flows_blocked << ")\n      " << s.details
        << "\n";
  }
}

ExitCode CmdCheck(const Options& opts, std::ostream& out, std::ostream& err) {
  const IsolationPolicy policy = LoadPolicy(opts);
  if (!ReportViolations(policy, err)) return ExitCode::kFailure;

  std::unique_ptr<ProbeBackend> backend;
  if (opts.backend == "sim") {
    backend = std::make_unique<SimulatedBackend>(policy);
  } else {
    backend = std::make_unique<LiveProbeBackend>();
    err << "live backend: probes are not available in this build; dependent "
           "tests are skipped\n";
  }

  const TestReport battery = RunBattery(policy, *backend);
  std::optional<ThreatReport> threats;
  if (opts.threats) threats = RunThreatSuite(policy, *backend);

  if (!opts.json) {
    PrintTable(battery, threats, out);
  } else {
    nlohmann::json report = TestReportToJson(battery);
    if (threats) report["threats"] = ThreatReportToJson(*threats);
    out << report.dump(2) << "\n";
  }
  const int failed = battery.Summary().fail + (threats ? threats->Summary().fail : 0);
  return failed == 0 ? ExitCode::kOk : ExitCode::kFailure;
}

ExitCode CmdMonitor(const Options& opts, std::ostream& out, std::ostream& err) {
  const IsolationPolicy policy = LoadPolicy(opts);
  if (!ReportViolations(policy, err)) return ExitCode::kFailure;
  const MonitorMode mode =
      opts.mode == "observe" ? MonitorMode::kObserve : MonitorMode::kStrict;

  std::optional<LogKillExecutor> executor;
  if (!opts.directives_log.empty()) executor.emplace(opts.directives_log);
  const MonitorState state =
      ReplayFile(policy, opts.replay_path, mode, executor ? &*executor : nullptr);

  if (!opts.json) {
    out << "mode       " << ToString(state.mode) << "\n"
        << "permitted  " << state.permitted << "\n"
        << "forbidden  " << state.forbidden << "\n"
        << "unknown    " << state.unknown << "\n"
        << "malformed  " << state.malformed << "\n"
        << "directives " << state.directives.size() << "\n";
  } else {
    out << MonitorReportToJson(state).dump(2) << "\n";
  }
  if (!opts.metrics_out.empty()) WriteFile(opts.metrics_out, ExportMetrics(state));

  const bool breach = state.forbidden > 0 || state.unknown > 0 ||
                      (mode == MonitorMode::kStrict && state.malformed > 0);
  return breach ? ExitCode::kFailure : ExitCode::kOk;
}

}  // namespace

ExitCode Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Compile, verify and monitor container isolation policies", "warden"};
  app.require_subcommand(1);
  app.add_option("--policy", opts.policy_path, "Isolation policy (JSON)")
      ->required()
      ->option_text("<path>");

  CLI::App* validate = app.add_subcommand("validate", "Check policy invariants");

  CLI::App* compile = app.add_subcommand("compile", "Emit the host firewall ruleset");
  compile->add_option("--out", opts.out_path, "Write the ruleset here instead of stdout");

  CLI::App* explain = app.add_subcommand("explain", "Decide one flow with both oracles");
  explain->add_option("--src", opts.src, "Source service")->required();
  explain->add_option("--src-zone", opts.src_zone,
                      "Source zone (default: the zone the service would route through)");
  explain->add_option("--dst", opts.dst, "Destination IP")->required();
  explain->add_option("--port", opts.port, "Destination port (tcp/udp)");
  explain->add_option("--proto", opts.proto, "tcp, udp or icmp")->required();
  explain->add_option("--state", opts.state, "new or established")
      ->check(CLI::IsMember({"new", "established"}));

  CLI::App* check = app.add_subcommand("check", "Run the isolation test battery");
  check->add_option("--backend", opts.backend, "Probe backend")
      ->check(CLI::IsMember({"sim", "live"}));
  check->add_flag("--threats", opts.threats, "Also run the threat-scenario suite");
  check->add_flag("--json,!--table", opts.json, "JSON report (default); --table for text");

  CLI::App* monitor = app.add_subcommand("monitor", "Replay connection events");
  monitor->add_option("--replay", opts.replay_path, "Event stream (JSONL)")->required();
  monitor->add_option("--mode", opts.mode, "strict or observe")
      ->check(CLI::IsMember({"strict", "observe"}));
  monitor->add_option("--metrics-out", opts.metrics_out, "Write metrics exposition here");
  monitor->add_option("--directives-log", opts.directives_log,
                      "Append kill directives to this file");
  monitor->add_flag("--json,!--table", opts.json, "JSON report (default); --table for text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return ExitCode::kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return ExitCode::kUsage;
  }

  try {
    if (*validate) return CmdValidate(opts, out);
    if (*compile) return CmdCompile(opts, out, err);
    if (*explain) return CmdExplain(opts, out, err);
    if (*check) return CmdCheck(opts, out, err);
    if (*monitor) return CmdMonitor(opts, out, err);
  } catch (const UsageError& e) {
    err << "warden: " << e.what() << "\n";
    return ExitCode::kUsage;
  } catch (const IoError& e) {
    err << "warden: " << e.what() << "\n";
    return ExitCode::kUsage;
  }
  return ExitCode::kUsage;
}

}  // namespace warden::cli
