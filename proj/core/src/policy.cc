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

#include "warden/policy.h"

#include <algorithm>

namespace warden {
namespace {

template <typename Enum, size_t N>
std::optional<Enum> Lookup(const std::pair<std::string_view, Enum> (&table)[N],
                           std::string_view text) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <typename Enum, size_t N>
std::string_view Name(const std::pair<std::string_view, Enum> (&table)[N],
                      Enum value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<std::string_view, ZoneKind> kZoneKinds[] = {
    {"ingress_dmz", ZoneKind::kIngressDmz},
    {"internal", ZoneKind::kInternal},
    {"egress_dmz", ZoneKind::kEgressDmz},
};
constexpr std::pair<std::string_view, Protocol> kProtocols[] = {
    {"tcp", Protocol::kTcp},
    {"udp", Protocol::kUdp},
    {"icmp", Protocol::kIcmp},
    {"any", Protocol::kAny},
};
constexpr std::pair<std::string_view, TlsVersion> kTlsVersions[] = {
    {"1.0", TlsVersion::kTls10},
    {"1.1", TlsVersion::kTls11},
    {"1.2", TlsVersion::kTls12},
    {"1.3", TlsVersion::kTls13},
};
constexpr std::pair<std::string_view, MountMode> kMountModes[] = {
    {"read_only", MountMode::kReadOnly},
    {"writable_persistent", MountMode::kWritablePersistent},
    {"writable_ephemeral", MountMode::kWritableEphemeral},
};

}  // namespace

std::string_view ToString(ZoneKind kind) { return Name(kZoneKinds, kind); }
std::string_view ToString(Protocol proto) { return Name(kProtocols, proto); }
std::string_view ToString(TlsVersion version) {
  return Name(kTlsVersions, version);
}
std::string_view ToString(MountMode mode) { return Name(kMountModes, mode); }

std::optional<ZoneKind> ParseZoneKind(std::string_view text) {
  return Lookup(kZoneKinds, text);
}
std::optional<Protocol> ParseProtocol(std::string_view text) {
  return Lookup(kProtocols, text);
}
std::optional<TlsVersion> ParseTlsVersion(std::string_view text) {
  return Lookup(kTlsVersions, text);
}
std::optional<MountMode> ParseMountMode(std::string_view text) {
  return Lookup(kMountModes, text);
}

bool ServiceSpec::AttachedTo(std::string_view zone) const {
  return std::find(attachments.begin(), attachments.end(), zone) !=
         attachments.end();
}

const Zone* IsolationPolicy::FindZone(std::string_view name) const {
  for (const Zone& zone : zones) {
    if (zone.name == name) return &zone;
  }
  return nullptr;
}

const ServiceSpec* IsolationPolicy::FindService(std::string_view name) const {
  for (const ServiceSpec& service : services) {
    if (service.name == name) return &service;
  }
  return nullptr;
}

std::vector<Endpoint> ResolveEndpoints(const IsolationPolicy& policy) {
  std::vector<Endpoint> endpoints;
  std::map<std::string, uint64_t, std::less<>> next_host;
  for (const ServiceSpec& service : policy.services) {
    for (const std::string& zone_name : service.attachments) {
      const Zone* zone = policy.FindZone(zone_name);
      if (zone == nullptr) continue;
      if (auto it = service.addresses.find(zone_name);
          it != service.addresses.end()) {
        endpoints.push_back({service.name, it->second, zone_name});
        continue;
      }
      uint64_t& k = next_host[zone_name];
      auto ip = zone->subnet.HostAt(kFirstAllocatedHost + k);
      ++k;
      if (ip) endpoints.push_back({service.name, *ip, zone_name});
    }
  }
  return endpoints;
}

std::optional<Endpoint> FindEndpoint(const std::vector<Endpoint>& endpoints,
                                     std::string_view service,
                                     std::string_view zone) {
  for (const Endpoint& ep : endpoints) {
    if (ep.service == service && ep.zone == zone) return ep;
  }
  return std::nullopt;
}

std::optional<Endpoint> SelectSourceEndpoint(
    const IsolationPolicy& policy, const std::vector<Endpoint>& endpoints,
    std::string_view service, const IpAddress& dst) {
  const ServiceSpec* spec = policy.FindService(service);
  if (spec == nullptr) return std::nullopt;
  std::optional<Endpoint> egress;
  std::optional<Endpoint> first;
  for (const std::string& zone_name : spec->attachments) {
    const Zone* zone = policy.FindZone(zone_name);
    auto ep = FindEndpoint(endpoints, service, zone_name);
    if (zone == nullptr || !ep) continue;
    if (zone->subnet.Contains(dst)) return ep;
    if (!egress && zone->kind == ZoneKind::kEgressDmz) egress = ep;
    if (!first) first = ep;
  }
  return egress ? egress : first;
}

}  // namespace warden
