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

#include "warden/hardening.h"

#include <algorithm>
#include <map>
#include <tuple>

namespace warden {
namespace {

// True when `path` is `dir` or lies below it.
bool PathWithin(std::string_view path, std::string_view dir) {
  while (dir.size() > 1 && dir.back() == '/') dir.remove_suffix(1);
  if (dir == "/") return !path.empty() && path.front() == '/';
  if (path.substr(0, dir.size()) != dir) return false;
  return path.size() == dir.size() || path[dir.size()] == '/';
}

std::string PortText(const PortBinding& p) {
  return std::to_string(p.port) + "/" + std::string(ToString(p.proto));
}

void Sort(std::vector<Finding>& findings) {
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.code, a.service, a.detail) < std::tie(b.code, b.service, b.detail);
  });
}

}  // namespace

TlsNegotiation NegotiateTls(TlsVersion policy_min, const TlsOffer& offer) {
  if (!offer.IsWellFormed()) return std::nullopt;
  if (offer.max_offered < policy_min) return std::nullopt;
  if (offer.min_offered > kHighestSupportedTls) return std::nullopt;
  return std::min(offer.max_offered, kHighestSupportedTls);
}

std::string_view ToString(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

std::vector<Finding> CheckHardening(const IsolationPolicy& policy,
                                    const HardeningOptions& options) {
  std::vector<Finding> out;
  for (const ServiceSpec& s : policy.services) {
    const HardeningSpec& h = s.hardening;
    for (const std::string& cap : h.retained_capabilities) {
      if (!options.allowed_capabilities.contains(cap)) {
        out.push_back({finding::kCapRetained, s.name, cap + " is retained",
                       Severity::kError});
      }
    }
    if (h.privileged) {
      out.push_back({finding::kPrivileged, s.name, "container runs privileged",
                     Severity::kError});
    }
    for (const Secret& secret : h.secrets) {
      if (secret.in_memory()) continue;
      const std::string& path = *secret.file_path;
      const Mount* governing = nullptr;
      for (const Mount& m : h.mounts) {
        if (PathWithin(path, m.path) &&
            (governing == nullptr || m.path.size() > governing->path.size())) {
          governing = &m;
        }
      }
      if (governing == nullptr) {
        out.push_back({finding::kSecretOnPersistentPath, s.name,
                       secret.name + " at " + path +
                           " is on the container's writable layer",
                       Severity::kError});
      } else if (governing->mode == MountMode::kWritablePersistent) {
        out.push_back({finding::kSecretOnPersistentPath, s.name,
                       secret.name + " at " + path +
                           " is on writable persistent mount " + governing->path,
                       Severity::kError});
      }
      for (const Mount& m : h.mounts) {
        if (&m != governing && m.mode == MountMode::kWritablePersistent &&
            PathWithin(path, m.path)) {
          out.push_back({finding::kWritablePersistentMount, s.name,
                         m.path + " encloses secret path " + path,
                         Severity::kWarning});
        }
      }
    }
  }
  if (policy.tls.min_version < options.tls_floor) {
    out.push_back({finding::kTlsBelowMin, "tls",
                   "minimum version " + std::string(ToString(policy.tls.min_version)) +
                       " is below " + std::string(ToString(options.tls_floor)),
                   Severity::kError});
  }
  Sort(out);
  return out;
}

std::vector<ObservedService> DeclaredExposure(const IsolationPolicy& policy) {
  std::vector<ObservedService> out;
  for (const ServiceSpec& s : policy.services) {
    out.push_back({s.name, s.attachments, s.published_ports});
  }
  return out;
}

std::vector<Finding> CheckExposure(const IsolationPolicy& policy,
                                   const std::vector<ObservedService>& observed) {
  std::vector<Finding> out;
  std::map<std::string, const ObservedService*> by_name;
  for (const ObservedService& o : observed) {
    if (!by_name.emplace(o.service, &o).second || policy.FindService(o.service) == nullptr) {
      out.push_back({finding::kUnexpectedService, o.service,
                     "observed container is not declared once in the policy",
                     Severity::kError});
    }
  }
  for (const ServiceSpec& s : policy.services) {
    auto it = by_name.find(s.name);
    if (it == by_name.end()) {
      out.push_back({finding::kMissingService, s.name,
                     "declared service was not observed", Severity::kError});
      continue;
    }
    const ObservedService& o = *it->second;
    const std::set<std::string> want(s.attachments.begin(), s.attachments.end());
    const std::set<std::string> got(o.attachments.begin(), o.attachments.end());
    for (const std::string& z : got) {
      if (!want.contains(z)) {
        out.push_back({finding::kUnexpectedAttachment, s.name,
                       "attached to undeclared zone " + z, Severity::kError});
      }
    }
    for (const std::string& z : want) {
      if (!got.contains(z)) {
        out.push_back({finding::kMissingAttachment, s.name,
                       "not attached to declared zone " + z, Severity::kError});
      }
    }
    const std::set<PortBinding> want_ports(s.published_ports.begin(),
                                           s.published_ports.end());
    const std::set<PortBinding> got_ports(o.published_ports.begin(),
                                          o.published_ports.end());
    for (const PortBinding& p : got_ports) {
      if (!want_ports.contains(p)) {
        out.push_back({finding::kUnexpectedPort, s.name,
                       "publishes undeclared host port " + PortText(p),
                       Severity::kError});
      }
    }
    for (const PortBinding& p : want_ports) {
      if (!got_ports.contains(p)) {
        out.push_back({finding::kMissingPort, s.name,
                       "declared host port " + PortText(p) + " is not published",
                       Severity::kError});
      }
    }
  }
  Sort(out);
  return out;
}

}  // namespace warden
