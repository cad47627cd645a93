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

#include "warden/monitor.h"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <sstream>

#include "warden/error.h"

namespace warden {
namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedEventError(std::string("missing ") + key);
  return *it;
}

std::string StringField(const json& obj, const char* key) {
  const json& v = Field(obj, key);
  if (!v.is_string()) throw MalformedEventError(std::string(key) + " is not a string");
  return v.get<std::string>();
}

IpAddress IpField(const json& obj, const char* key) {
  auto ip = IpAddress::Parse(StringField(obj, key));
  if (!ip) throw MalformedEventError(std::string(key) + " is not an IP address");
  return *ip;
}

void Record(MonitorState& state, KillDirective directive) {
  if (!state.issued.emplace(directive.target_service, directive.reason_class).second) {
    return;
  }
  directive.advisory = state.mode == MonitorMode::kObserve;
  state.directives.push_back(std::move(directive));
}

std::string DriftSummary(const RuleDiff& diff) {
  std::string out;
  auto list = [&](const char* label, const std::vector<FirewallRule>& rules) {
    out += std::string(out.empty() ? "" : " ") + label + "=[";
    for (size_t i = 0; i < rules.size(); ++i) {
      out += (i ? "," : "") + rules[i].id;
    }
    out += "]";
  };
  list("missing", diff.missing);
  list("unexpected", diff.unexpected);
  out += " reordered=" + std::to_string(diff.reordered.size());
  return out;
}

}  // namespace

std::optional<int64_t> ParseTimestamp(std::string_view text) {
  int year, month, day, hour, minute, second, consumed = 0;
  const std::string buf(text);
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day,
                  &hour, &minute, &second, &consumed) != 6 ||
      consumed != 19) {
    return std::nullopt;
  }
  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    size_t digits = 0;
    while (digits < rest.size() && rest[digits] >= '0' && rest[digits] <= '9') {
      ++digits;
    }
    if (digits == 0) return std::nullopt;
    rest.remove_prefix(digits);
  }
  if (rest != "Z" && rest != "+00:00") return std::nullopt;

  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  const time_t t = timegm(&tm);
  // timegm normalizes out-of-range fields; reject anything it had to fix.
  std::tm check{};
  gmtime_r(&t, &check);
  if (check.tm_year != year - 1900 || check.tm_mon != month - 1 ||
      check.tm_mday != day || check.tm_hour != hour || check.tm_min != minute ||
      check.tm_sec != second) {
    return std::nullopt;
  }
  return static_cast<int64_t>(t);
}

std::string FormatTimestamp(int64_t unix_seconds) {
  const time_t t = static_cast<time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ConnectionEvent ParseEvent(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line.begin(), line.end());
  } catch (const json::parse_error&) {
    throw MalformedEventError("not valid JSON");
  }
  if (!obj.is_object()) throw MalformedEventError("not a JSON object");

  ConnectionEvent event;
  auto ts = ParseTimestamp(StringField(obj, "ts"));
  if (!ts) throw MalformedEventError("ts is not an RFC 3339 UTC timestamp");
  event.ts = *ts;
  if (auto it = obj.find("src_service"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedEventError("src_service is not a string");
    event.src_service = it->get<std::string>();
    if (event.src_service == "unknown") event.src_service.clear();
  }
  event.src_ip = IpField(obj, "src_ip");
  event.dst_ip = IpField(obj, "dst_ip");
  auto proto = ParseProtocol(StringField(obj, "proto"));
  if (!proto || *proto == Protocol::kAny) {
    throw MalformedEventError("proto must be tcp, udp or icmp");
  }
  event.proto = *proto;
  auto state = ParseFlowState(StringField(obj, "state"));
  if (!state) throw MalformedEventError("state must be new or established");
  event.state = *state;

  auto port = obj.find("dst_port");
  const bool has_port = port != obj.end() && !port->is_null();
  if (event.proto == Protocol::kIcmp) {
    if (has_port) throw MalformedEventError("icmp events carry no dst_port");
  } else {
    if (!has_port || !port->is_number_integer()) {
      throw MalformedEventError("dst_port is required for tcp/udp");
    }
    const int64_t p = port->get<int64_t>();
    if (p < 1 || p > 65535) throw MalformedEventError("dst_port out of range");
    event.dst_port = static_cast<int>(p);
  }
  return event;
}

json EventToJson(const ConnectionEvent& event) {
  json out = {{"ts", FormatTimestamp(event.ts)},
              {"src_service", event.src_service.empty() ? "unknown" : event.src_service},
              {"src_ip", event.src_ip.ToString()},
              {"dst_ip", event.dst_ip.ToString()},
              {"proto", ToString(event.proto)},
              {"state", ToString(event.state)}};
  out["dst_port"] = event.dst_port ? json(*event.dst_port) : json(nullptr);
  return out;
}

std::string_view ToString(Classification c) {
  switch (c) {
    case Classification::kPermitted: return "permitted";
    case Classification::kForbidden: return "forbidden";
    case Classification::kUnknown: return "unknown";
  }
  return "?";
}

std::string_view ToString(MonitorMode mode) {
  return mode == MonitorMode::kStrict ? "strict" : "observe";
}

std::string_view ToString(KillReason reason) {
  switch (reason) {
    case KillReason::kForbiddenEgress: return "FORBIDDEN_EGRESS";
    case KillReason::kUnknownSource: return "UNKNOWN_SOURCE";
    case KillReason::kMalformedEvent: return "MALFORMED_EVENT";
    case KillReason::kRuleDrift: return "RULE_DRIFT";
  }
  return "?";
}

IngestResult IngestEvent(MonitorState state, const PolicyDecider& decider,
                         const ConnectionEvent& event) {
  const uint64_t position = state.total();
  FlowQuery flow{{}, event.dst_ip, event.dst_port, event.proto, event.state};
  if (!flow.IsWellFormed()) {
    return {IngestMalformed(std::move(state), "port does not match protocol"),
            Classification::kUnknown};
  }

  const Endpoint* source = decider.EndpointAt(event.src_ip);
  Classification c = Classification::kUnknown;
  if (source != nullptr &&
      (event.src_service.empty() || event.src_service == source->service)) {
    flow.src = *source;
    c = decider.Decide(flow) == Decision::kAllow ? Classification::kPermitted
                                                 : Classification::kForbidden;
  }

  switch (c) {
    case Classification::kPermitted:
      ++state.permitted;
      return {std::move(state), c};
    case Classification::kForbidden:
      ++state.forbidden;
      break;
    case Classification::kUnknown:
      ++state.unknown;
      break;
  }
  if (!state.first_breach) state.first_breach = BreachRecord{position, c, event};

  KillDirective d;
  if (c == Classification::kForbidden) {
    d.target_service = source->service;
    d.reason_class = KillReason::kForbiddenEgress;
    d.reason = "forbidden flow " + flow.ToString();
  } else {
    d.reason_class = KillReason::kUnknownSource;
    d.reason = "unresolvable source " + event.src_ip.ToString() +
               (event.src_service.empty() ? "" : " (" + event.src_service + ")");
  }
  d.triggering_event = event;
  d.stream_position = position;
  d.issued_at = event.ts;
  Record(state, std::move(d));
  return {std::move(state), c};
}

IngestResult IngestEvent(MonitorState state, const IsolationPolicy& policy,
                         const ConnectionEvent& event) {
  return IngestEvent(std::move(state), PolicyDecider(policy), event);
}

MonitorState IngestMalformed(MonitorState state, const std::string& reason) {
  const uint64_t position = state.total();
  ++state.malformed;
  KillDirective d;
  d.reason_class = KillReason::kMalformedEvent;
  d.reason = reason;
  d.stream_position = position;
  Record(state, std::move(d));
  return state;
}

DriftCheck CheckRuleDrift(const IsolationPolicy& policy,
                          const FirewallRuleSet& observed) {
  const FirewallRuleSet expected = Compile(policy);
  DriftCheck out;
  out.diff = DiffRulesets(expected, observed);
  if (out.diff.empty()) return out;

  bool widened = false;
  for (const FirewallRule& r : out.diff.missing) widened |= r.action == RuleAction::kDeny;
  for (const FirewallRule& r : out.diff.unexpected) {
    widened |= r.action == RuleAction::kAccept;
  }
  if (!widened) {
    for (const FlowQuery& flow : FlowUniverse(policy)) {
      if (EvaluateFlow(observed, flow).decision == Decision::kAllow &&
          EvaluateFlow(expected, flow).decision == Decision::kDeny) {
        widened = true;
        break;
      }
    }
  }
  if (!widened) return out;

  KillDirective d;
  d.reason_class = KillReason::kRuleDrift;
  d.reason = "installed ruleset permits traffic the policy denies";
  d.drift_ref = DriftSummary(out.diff);
  out.directive = std::move(d);
  return out;
}

LogKillExecutor::LogKillExecutor(std::filesystem::path path) : path_(std::move(path)) {}

void LogKillExecutor::Execute(const KillDirective& directive) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot open directive log " + path_.string());
  out << DirectiveToJson(directive).dump() << "\n";
  if (!out) throw IoError("cannot write directive log " + path_.string());
}

void LiveKillExecutor::Execute(const KillDirective&) {
  throw NotSupportedError("live container termination");
}

std::optional<ConnectionEvent> LiveCaptureSource::Next() {
  throw NotSupportedError("live connection capture");
}

IsolationMonitor::IsolationMonitor(IsolationPolicy policy, MonitorMode mode,
                                   KillExecutor* executor)
    : decider_(std::move(policy)), executor_(executor) {
  state_.mode = mode;
}

Classification IsolationMonitor::Ingest(const ConnectionEvent& event) {
  std::lock_guard lock(mu_);
  const size_t before = state_.directives.size();
  IngestResult result = IngestEvent(std::move(state_), decider_, event);
  state_ = std::move(result.state);
  Dispatch(before);
  return result.classification;
}

void IsolationMonitor::RecordMalformed(const std::string& reason) {
  std::lock_guard lock(mu_);
  const size_t before = state_.directives.size();
  state_ = IngestMalformed(std::move(state_), reason);
  Dispatch(before);
}

DriftCheck IsolationMonitor::CheckRules(const FirewallRuleSet& observed) {
  DriftCheck check = CheckRuleDrift(decider_.policy(), observed);
  if (check.directive) {
    std::lock_guard lock(mu_);
    const size_t before = state_.directives.size();
    Record(state_, *check.directive);
    Dispatch(before);
  }
  return check;
}

void IsolationMonitor::Dispatch(size_t first_new) {
  if (executor_ == nullptr) return;
  for (size_t i = first_new; i < state_.directives.size(); ++i) {
    if (!state_.directives[i].advisory) executor_->Execute(state_.directives[i]);
  }
}

MonitorState IsolationMonitor::Snapshot() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::string IsolationMonitor::Metrics() const { return ExportMetrics(Snapshot()); }

void IsolationMonitor::Reset() {
  std::lock_guard lock(mu_);
  const MonitorMode mode = state_.mode;
  state_ = MonitorState{};
  state_.mode = mode;
}

MonitorState Replay(const IsolationPolicy& policy, std::istream& events,
                    MonitorMode mode, KillExecutor* executor) {
  IsolationMonitor monitor(policy, mode, executor);
  std::string line;
  while (std::getline(events, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ConnectionEvent event;
    try {
      event = ParseEvent(line);
    } catch (const MalformedEventError& e) {
      monitor.RecordMalformed(e.what());
      continue;
    }
    monitor.Ingest(event);
  }
  if (events.bad()) throw IoError("error while reading event stream");
  return monitor.Snapshot();
}

MonitorState ReplayFile(const IsolationPolicy& policy,
                        const std::filesystem::path& path, MonitorMode mode,
                        KillExecutor* executor) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return Replay(policy, in, mode, executor);
}

json DirectiveToJson(const KillDirective& d) {
  json out = {{"scope", d.target_service ? "service" : "all"},
              {"reason_class", ToString(d.reason_class)},
              {"reason", d.reason},
              {"advisory", d.advisory}};
  if (d.target_service) out["target"] = *d.target_service;
  if (d.triggering_event) out["triggering_event"] = EventToJson(*d.triggering_event);
  if (d.stream_position) out["stream_position"] = *d.stream_position;
  if (d.drift_ref) out["drift_ref"] = *d.drift_ref;
  out["issued_at"] = d.issued_at ? json(FormatTimestamp(*d.issued_at)) : json(nullptr);
  return out;
}

json MonitorReportToJson(const MonitorState& state) {
  json out = {{"mode", ToString(state.mode)},
              {"total", state.total()},
              {"counters",
               {{"permitted", state.permitted},
                {"forbidden", state.forbidden},
                {"unknown", state.unknown},
                {"malformed", state.malformed}}}};
  if (state.first_breach) {
    out["first_breach"] = {{"position", state.first_breach->position},
                           {"classification", ToString(state.first_breach->classification)},
                           {"event", EventToJson(state.first_breach->event)}};
  } else {
    out["first_breach"] = nullptr;
  }
  json directives = json::array();
  for (const KillDirective& d : state.directives) directives.push_back(DirectiveToJson(d));
  out["directives"] = std::move(directives);
  return out;
}

std::string ExportMetrics(const MonitorState& state) {
  std::ostringstream out;
  out << "# TYPE isolation_events_total counter\n"
      << "isolation_events_total{class=\"permitted\"} " << state.permitted << "\n"
      << "isolation_events_total{class=\"forbidden\"} " << state.forbidden << "\n"
      << "isolation_events_total{class=\"unknown\"} " << state.unknown << "\n"
      << "# TYPE isolation_malformed_events_total counter\n"
      << "isolation_malformed_events_total " << state.malformed << "\n"
      << "# TYPE isolation_kill_directives_total counter\n"
      << "isolation_kill_directives_total " << state.directives.size() << "\n"
      << "# TYPE isolation_first_breach_timestamp_seconds gauge\n"
      << "isolation_first_breach_timestamp_seconds "
      << (state.first_breach ? state.first_breach->event.ts : 0) << "\n";
  return out.str();
}

}  // namespace warden
