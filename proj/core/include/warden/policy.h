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

#ifndef WARDEN_POLICY_H_
#define WARDEN_POLICY_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "warden/ip.h"

namespace warden {

enum class ZoneKind { kIngressDmz, kInternal, kEgressDmz };

// Policy documents only carry kTcp/kUdp; kIcmp and kAny appear in flows and
// firewall rules.
enum class Protocol { kTcp, kUdp, kIcmp, kAny };

// Declaration order is the protocol order.
enum class TlsVersion { kTls10, kTls11, kTls12, kTls13 };

enum class MountMode { kReadOnly, kWritablePersistent, kWritableEphemeral };

std::string_view ToString(ZoneKind kind);
std::string_view ToString(Protocol proto);
std::string_view ToString(TlsVersion version);
std::string_view ToString(MountMode mode);
std::optional<ZoneKind> ParseZoneKind(std::string_view text);
std::optional<Protocol> ParseProtocol(std::string_view text);
std::optional<TlsVersion> ParseTlsVersion(std::string_view text);
std::optional<MountMode> ParseMountMode(std::string_view text);

struct Zone {
  std::string name;
  ZoneKind kind = ZoneKind::kInternal;
  Cidr subnet;
  bool routed_gateway = false;

  friend bool operator==(const Zone&, const Zone&) = default;
};

struct PortBinding {
  int port = 0;
  Protocol proto = Protocol::kTcp;

  friend auto operator<=>(const PortBinding&, const PortBinding&) = default;
};

struct Mount {
  std::string path;
  MountMode mode = MountMode::kReadOnly;

  friend bool operator==(const Mount&, const Mount&) = default;
};

// A secret is delivered either in memory (no file_path) or as a file.
struct Secret {
  std::string name;
  std::optional<std::string> file_path;

  bool in_memory() const { return !file_path.has_value(); }
  friend bool operator==(const Secret&, const Secret&) = default;
};

struct HardeningSpec {
  std::set<std::string> retained_capabilities;
  std::vector<Mount> mounts;
  std::vector<Secret> secrets;
  bool privileged = false;

  friend bool operator==(const HardeningSpec&, const HardeningSpec&) = default;
};

struct ServiceSpec {
  std::string name;
  std::vector<std::string> attachments;
  std::vector<PortBinding> published_ports;
  HardeningSpec hardening;
  // Optional per-zone address overrides. Zones without an entry get an
  // address from the deterministic allocator (see ResolveEndpoints).
  std::map<std::string, IpAddress> addresses;

  bool AttachedTo(std::string_view zone) const;
  friend bool operator==(const ServiceSpec&, const ServiceSpec&) = default;
};

// An allowed intra-topology flow, directional.
struct ServiceLink {
  std::string from_service;
  std::string to_service;
  int dest_port = 0;
  Protocol proto = Protocol::kTcp;

  friend bool operator==(const ServiceLink&, const ServiceLink&) = default;
};

// A pinned egress exception: one service, one private target, one port.
struct Airlock {
  std::string name;
  std::string from_service;
  std::string via_zone;
  IpAddress target_ip;
  int target_port = 0;
  Protocol proto = Protocol::kTcp;
  bool require_upstream_tls_verification = true;

  friend bool operator==(const Airlock&, const Airlock&) = default;
};

struct IngressRule {
  Cidr source;
  std::string to_service;
  int dest_port = 0;
  Protocol proto = Protocol::kTcp;

  friend bool operator==(const IngressRule&, const IngressRule&) = default;
};

struct TlsPolicy {
  TlsVersion min_version = TlsVersion::kTls12;

  friend bool operator==(const TlsPolicy&, const TlsPolicy&) = default;
};

struct IsolationPolicy {
  std::vector<Zone> zones;
  std::vector<ServiceSpec> services;
  std::vector<ServiceLink> service_links;
  std::vector<Airlock> airlocks;
  std::vector<IngressRule> ingress;
  TlsPolicy tls;

  const Zone* FindZone(std::string_view name) const;
  const ServiceSpec* FindService(std::string_view name) const;

  friend bool operator==(const IsolationPolicy&,
                         const IsolationPolicy&) = default;
};

// One service's presence in one zone. External endpoints (flows entering from
// outside the topology) have empty service and zone.
struct Endpoint {
  std::string service;
  IpAddress ip;
  std::string zone;

  bool is_external() const { return service.empty(); }
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

// First host offset handed out by the allocator; .1 is left to the bridge.
inline constexpr uint64_t kFirstAllocatedHost = 2;

// Addresses every (service, attached zone) pair. Explicit addresses win;
// otherwise the k-th service attached to a zone (declaration order, counting
// only services without an override for that zone) gets
// network + kFirstAllocatedHost + k. Pairs that reference unknown zones or do
// not fit into the subnet are omitted; validation reports them.
std::vector<Endpoint> ResolveEndpoints(const IsolationPolicy& policy);

// Endpoint of `service` in `zone`, if it has one.
std::optional<Endpoint> FindEndpoint(const std::vector<Endpoint>& endpoints,
                                     std::string_view service,
                                     std::string_view zone);

// The interface a service would use to reach `dst`: the attached zone whose
// subnet contains dst, else an attached egress DMZ, else the first
// attachment.
std::optional<Endpoint> SelectSourceEndpoint(const IsolationPolicy& policy,
                                             const std::vector<Endpoint>& endpoints,
                                             std::string_view service,
                                             const IpAddress& dst);

}  // namespace warden

#endif  // WARDEN_POLICY_H_
