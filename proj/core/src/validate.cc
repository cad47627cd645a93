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

#include "warden/validate.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "warden/error.h"

namespace warden {
namespace {

bool ValidPort(int port) { return port >= 1 && port <= 65535; }
bool IsTransport(Protocol p) { return p == Protocol::kTcp || p == Protocol::kUdp; }

std::string PortString(int port, Protocol proto) {
  return std::to_string(port) + "/" + std::string(ToString(proto));
}

class Collector {
 public:
  void Add(std::string code, std::string subject, std::string message) {
    out_.push_back({std::move(code), std::move(subject), std::move(message)});
  }

  template <typename Range, typename NameOf>
  void UniqueNames(const Range& items, NameOf name_of, std::string_view category) {
    std::set<std::string> seen;
    for (const auto& item : items) {
      const std::string& name = name_of(item);
      if (!seen.insert(name).second) {
        Add(violation::kDuplicateName, std::string(category) + ":" + name,
            "name declared more than once");
      }
    }
  }

  void Port(int port, Protocol proto, const std::string& subject) {
    if (!ValidPort(port)) {
      Add(violation::kInvalidPort, subject,
          "port " + std::to_string(port) + " outside 1-65535");
    }
    if (!IsTransport(proto)) {
      Add(violation::kInvalidProto, subject,
          "protocol " + std::string(ToString(proto)) + " is not tcp or udp");
    }
  }

  std::vector<Violation> Take() {
    std::sort(out_.begin(), out_.end());
    out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
    return std::move(out_);
  }

 private:
  std::vector<Violation> out_;
};

void CheckZones(const IsolationPolicy& p, Collector& c) {
  c.UniqueNames(p.zones, [](const Zone& z) -> const std::string& { return z.name; },
                "zone");
  int internal = 0;
  int ingress = 0;
  for (const Zone& z : p.zones) {
    if (z.kind == ZoneKind::kInternal) ++internal;
    if (z.kind == ZoneKind::kIngressDmz) ++ingress;
    if (z.kind == ZoneKind::kInternal && z.routed_gateway) {
      c.Add(violation::kInternalRouted, z.name,
            "internal zone must not have a routed gateway");
    }
    if (!IsPrivateCidr(z.subnet)) {
      c.Add(violation::kZoneNotPrivate, z.name,
            "subnet " + z.subnet.ToString() + " is not a private range");
    }
  }
  if (internal != 1) {
    c.Add(violation::kZoneCardinality, "internal",
          "expected exactly one internal zone, found " + std::to_string(internal));
  }
  if (ingress > 1) {
    c.Add(violation::kZoneCardinality, "ingress_dmz",
          "expected at most one ingress DMZ, found " + std::to_string(ingress));
  }
  for (size_t i = 0; i < p.zones.size(); ++i) {
    for (size_t j = i + 1; j < p.zones.size(); ++j) {
      if (p.zones[i].subnet.Overlaps(p.zones[j].subnet)) {
        c.Add(violation::kZoneOverlap, p.zones[i].name + "," + p.zones[j].name,
              "zone subnets overlap");
      }
    }
  }
}

void CheckServices(const IsolationPolicy& p, Collector& c) {
  c.UniqueNames(p.services,
                [](const ServiceSpec& s) -> const std::string& { return s.name; },
                "service");
  for (const ServiceSpec& s : p.services) {
    if (s.attachments.empty()) {
      c.Add(violation::kNoAttachments, s.name, "service has no zone attachment");
    }
    std::set<std::string> attached;
    for (const std::string& zone : s.attachments) {
      if (p.FindZone(zone) == nullptr) {
        c.Add(violation::kUnknownZone, s.name, "attachment to unknown zone " + zone);
      }
      if (!attached.insert(zone).second) {
        c.Add(violation::kDuplicateAttachment, s.name, "zone " + zone + " listed twice");
      }
    }
    std::set<PortBinding> published;
    for (const PortBinding& port : s.published_ports) {
      c.Port(port.port, port.proto, s.name);
      if (!published.insert(port).second) {
        c.Add(violation::kDuplicatePublishedPort, s.name,
              PortString(port.port, port.proto) + " published twice");
      }
    }
    for (const auto& [zone, ip] : s.addresses) {
      const Zone* z = p.FindZone(zone);
      if (!s.AttachedTo(zone)) {
        c.Add(violation::kUnknownZone, s.name,
              "address given for unattached zone " + zone);
      } else if (z != nullptr && !z->subnet.Contains(ip)) {
        c.Add(violation::kEndpointOutsideSubnet, s.name + "@" + zone,
              ip.ToString() + " is outside " + z->subnet.ToString());
      }
    }
    if (s.hardening.privileged) {
      c.Add(violation::kPrivilegedContainer, s.name,
            "service runs as a privileged container");
    }
  }

  // Every (service, known zone) pair must receive an address inside the
  // zone subnet, and addresses must be unique.
  const std::vector<Endpoint> endpoints = ResolveEndpoints(p);
  for (const ServiceSpec& s : p.services) {
    for (const std::string& zone : s.attachments) {
      if (p.FindZone(zone) != nullptr && !s.addresses.contains(zone) &&
          !FindEndpoint(endpoints, s.name, zone)) {
        c.Add(violation::kEndpointOutsideSubnet, s.name + "@" + zone,
              "zone subnet has no free address for the service");
      }
    }
  }
  std::map<IpAddress, std::string> owners;
  for (const Endpoint& ep : endpoints) {
    const std::string who = ep.service + "@" + ep.zone;
    auto [it, inserted] = owners.emplace(ep.ip, who);
    if (!inserted && it->second != who) {
      c.Add(violation::kDuplicateAddress, ep.ip.ToString(),
            "address shared by " + it->second + " and " + who);
    }
  }
}

bool ShareZone(const ServiceSpec& a, const ServiceSpec& b) {
  return std::any_of(a.attachments.begin(), a.attachments.end(),
                     [&](const std::string& z) { return b.AttachedTo(z); });
}

void CheckLinks(const IsolationPolicy& p, Collector& c) {
  std::set<std::tuple<std::string, std::string, int, Protocol>> seen;
  for (const ServiceLink& l : p.service_links) {
    const std::string subject = l.from_service + "->" + l.to_service + ":" +
                                PortString(l.dest_port, l.proto);
    c.Port(l.dest_port, l.proto, subject);
    const ServiceSpec* from = p.FindService(l.from_service);
    const ServiceSpec* to = p.FindService(l.to_service);
    if (from == nullptr) {
      c.Add(violation::kUnknownService, subject, "unknown service " + l.from_service);
    }
    if (to == nullptr) {
      c.Add(violation::kUnknownService, subject, "unknown service " + l.to_service);
    }
    if (from != nullptr && to != nullptr && !ShareZone(*from, *to)) {
      c.Add(violation::kLinkNoSharedZone, subject,
            "linked services share no zone attachment");
    }
    if (!seen.emplace(l.from_service, l.to_service, l.dest_port, l.proto).second) {
      c.Add(violation::kDuplicateLink, subject, "link declared more than once");
    }
  }
}

void CheckAirlocks(const IsolationPolicy& p, Collector& c) {
  c.UniqueNames(p.airlocks,
                [](const Airlock& a) -> const std::string& { return a.name; },
                "airlock");
  for (const Airlock& a : p.airlocks) {
    c.Port(a.target_port, a.proto, a.name);
    if (!IsPrivateIp(a.target_ip)) {
      c.Add(violation::kAirlockPublicTarget, a.name,
            "target " + a.target_ip.ToString() + " is not a private address");
    }
    for (const Zone& z : p.zones) {
      if (z.subnet.Contains(a.target_ip)) {
        c.Add(violation::kAirlockTargetInTopology, a.name,
              "target " + a.target_ip.ToString() + " lies inside zone " + z.name);
      }
    }
    const Zone* via = p.FindZone(a.via_zone);
    if (via == nullptr) {
      c.Add(violation::kUnknownZone, a.name, "unknown via_zone " + a.via_zone);
    } else if (via->kind != ZoneKind::kEgressDmz) {
      c.Add(violation::kAirlockZoneNotEgress, a.name,
            "via_zone " + a.via_zone + " is not an egress DMZ");
    }
    const ServiceSpec* from = p.FindService(a.from_service);
    if (from == nullptr) {
      c.Add(violation::kUnknownService, a.name, "unknown service " + a.from_service);
    } else if (!from->AttachedTo(a.via_zone)) {
      c.Add(violation::kAirlockServiceNotAttached, a.name,
            a.from_service + " is not attached to " + a.via_zone);
    }
    for (const ServiceSpec& s : p.services) {
      if (s.name != a.from_service && s.AttachedTo(a.via_zone)) {
        c.Add(violation::kAirlockZoneShared, a.name,
              "egress zone " + a.via_zone + " is also attached by " + s.name);
      }
    }
  }
}

void CheckIngress(const IsolationPolicy& p, Collector& c) {
  std::set<std::tuple<Cidr, std::string, int, Protocol>> seen;
  for (const IngressRule& g : p.ingress) {
    const std::string subject = g.source.ToString() + "->" + g.to_service + ":" +
                                PortString(g.dest_port, g.proto);
    c.Port(g.dest_port, g.proto, subject);
    const ServiceSpec* to = p.FindService(g.to_service);
    if (to == nullptr) {
      c.Add(violation::kUnknownService, subject, "unknown service " + g.to_service);
    } else {
      const bool in_dmz = std::any_of(
          to->attachments.begin(), to->attachments.end(), [&](const std::string& z) {
            const Zone* zone = p.FindZone(z);
            return zone != nullptr && zone->kind == ZoneKind::kIngressDmz;
          });
      if (!in_dmz) {
        c.Add(violation::kIngressNotDmz, subject,
              g.to_service + " is not attached to an ingress DMZ");
      }
    }
    if (!seen.emplace(g.source, g.to_service, g.dest_port, g.proto).second) {
      c.Add(violation::kDuplicateIngress, subject, "ingress rule declared more than once");
    }
  }
}

}  // namespace

std::vector<Violation> ValidatePolicy(const IsolationPolicy& policy) {
  Collector c;
  CheckZones(policy, c);
  CheckServices(policy, c);
  CheckLinks(policy, c);
  CheckAirlocks(policy, c);
  CheckIngress(policy, c);
  return c.Take();
}

void RequireValid(const IsolationPolicy& policy) {
  const auto violations = ValidatePolicy(policy);
  if (violations.empty()) return;
  std::string detail;
  for (const Violation& v : violations) {
    if (!detail.empty()) detail += "; ";
    detail += v.code + " " + v.subject;
  }
  throw InvalidPolicyError(detail);
}

}  // namespace warden
