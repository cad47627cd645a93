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

#ifndef WARDEN_MONITOR_H_
#define WARDEN_MONITOR_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "warden/flow.h"
#include "warden/policy.h"
#include "warden/ruleset.h"

namespace warden {

// One observed connection attempt. src_service is empty when the source
// reported no name (or "unknown").
struct ConnectionEvent {
  int64_t ts = 0;  // seconds since the Unix epoch, UTC
  std::string src_service;
  IpAddress src_ip;
  IpAddress dst_ip;
  std::optional<int> dst_port;
  Protocol proto = Protocol::kTcp;
  FlowState state = FlowState::kNew;

  friend bool operator==(const ConnectionEvent&, const ConnectionEvent&) = default;
};

class MalformedEventError : public std::runtime_error {
 public:
  explicit MalformedEventError(const std::string& reason)
      : std::runtime_error("malformed event: " + reason) {}
};

// "2025-07-01T08:00:00Z"; fractional seconds are accepted and truncated.
std::optional<int64_t> ParseTimestamp(std::string_view text);
std::string FormatTimestamp(int64_t unix_seconds);

// One JSONL record. Throws MalformedEventError.
ConnectionEvent ParseEvent(std::string_view line);
nlohmann::json EventToJson(const ConnectionEvent& event);

enum class Classification { kPermitted, kForbidden, kUnknown };
std::string_view ToString(Classification c);

enum class MonitorMode { kStrict, kObserve };
std::string_view ToString(MonitorMode mode);

enum class KillReason { kForbiddenEgress, kUnknownSource, kMalformedEvent, kRuleDrift };
std::string_view ToString(KillReason reason);

struct KillDirective {
  std::optional<std::string> target_service;  // nullopt: all services
  KillReason reason_class = KillReason::kForbiddenEgress;
  std::string reason;
  // Exactly one trigger is set: an event (with its stream position), a
  // malformed line (position only) or a rule-drift summary.
  std::optional<ConnectionEvent> triggering_event;
  std::optional<uint64_t> stream_position;
  std::optional<std::string> drift_ref;
  // Event-derived; unset for triggers that carry no timestamp.
  std::optional<int64_t> issued_at;
  // Observe mode records directives without acting on them.
  bool advisory = false;

  friend bool operator==(const KillDirective&, const KillDirective&) = default;
};

struct BreachRecord {
  uint64_t position = 0;
  Classification classification = Classification::kForbidden;
  ConnectionEvent event;

  friend bool operator==(const BreachRecord&, const BreachRecord&) = default;
};

struct MonitorState {
  MonitorMode mode = MonitorMode::kStrict;
  uint64_t permitted = 0;
  uint64_t forbidden = 0;
  uint64_t unknown = 0;
  uint64_t malformed = 0;
  std::optional<BreachRecord> first_breach;
  std::vector<KillDirective> directives;
  // (target, reason class) pairs already issued; cleared only by a reset.
  std::set<std::pair<std::optional<std::string>, KillReason>> issued;

  uint64_t total() const { return permitted + forbidden + unknown + malformed; }
  friend bool operator==(const MonitorState&, const MonitorState&) = default;
};

struct IngestResult {
  MonitorState state;
  Classification classification;
};

// Classifies one event and folds it into the state. The event's stream
// position is state.total() before ingestion. Events whose flow is malformed
// (port/protocol mismatch) are counted as malformed and reported Unknown.
IngestResult IngestEvent(MonitorState state, const PolicyDecider& decider,
                         const ConnectionEvent& event);
IngestResult IngestEvent(MonitorState state, const IsolationPolicy& policy,
                         const ConnectionEvent& event);

// A record that could not be parsed.
MonitorState IngestMalformed(MonitorState state, const std::string& reason);

struct DriftCheck {
  RuleDiff diff;
  std::optional<KillDirective> directive;
};

// Compares an installed ruleset against Compile(policy). A missing deny, an
// unexpected accept, or any sweep flow that the observed rules allow and the
// expected rules deny raises a RULE_DRIFT directive against all services.
// Differences that only remove or reorder accepts raise nothing.
DriftCheck CheckRuleDrift(const IsolationPolicy& policy,
                          const FirewallRuleSet& observed);

// Receives directives that are not advisory.
class KillExecutor {
 public:
  virtual ~KillExecutor() = default;
  virtual void Execute(const KillDirective& directive) = 0;
};

// Appends one JSON object per directive to a log file.
class LogKillExecutor : public KillExecutor {
 public:
  explicit LogKillExecutor(std::filesystem::path path);
  void Execute(const KillDirective& directive) override;

 private:
  std::filesystem::path path_;
};

// Container-runtime termination; not available in this build.
class LiveKillExecutor : public KillExecutor {
 public:
  void Execute(const KillDirective& directive) override;
};

// A source of live connection events; not available in this build.
class LiveCaptureSource {
 public:
  std::optional<ConnectionEvent> Next();
};

// Thread-safe wrapper around MonitorState. Ingestion is serialized; snapshots
// and metrics may be taken concurrently and never observe a torn update.
class IsolationMonitor {
 public:
  IsolationMonitor(IsolationPolicy policy, MonitorMode mode,
                   KillExecutor* executor = nullptr);

  Classification Ingest(const ConnectionEvent& event);
  void RecordMalformed(const std::string& reason);
  DriftCheck CheckRules(const FirewallRuleSet& observed);

  MonitorState Snapshot() const;
  std::string Metrics() const;
  void Reset();

 private:
  void Dispatch(size_t first_new);

  const PolicyDecider decider_;
  KillExecutor* executor_;
  mutable std::mutex mu_;
  MonitorState state_;
};

// Folds a JSONL stream. Blank lines are skipped; unparseable lines are
// counted as malformed and do not stop the replay.
MonitorState Replay(const IsolationPolicy& policy, std::istream& events,
                    MonitorMode mode, KillExecutor* executor = nullptr);
// Throws IoError when the file cannot be read.
MonitorState ReplayFile(const IsolationPolicy& policy,
                        const std::filesystem::path& path, MonitorMode mode,
                        KillExecutor* executor = nullptr);

nlohmann::json DirectiveToJson(const KillDirective& directive);
nlohmann::json MonitorReportToJson(const MonitorState& state);

// Prometheus-style text exposition of the counters.
std::string ExportMetrics(const MonitorState& state);

}  // namespace warden

#endif  // WARDEN_MONITOR_H_
