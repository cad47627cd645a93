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

#ifndef WARDEN_HARDENING_H_
#define WARDEN_HARDENING_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "warden/policy.h"

namespace warden {

inline constexpr TlsVersion kHighestSupportedTls = TlsVersion::kTls13;

// Version range a peer offers. Well-formed iff min_offered <= max_offered.
struct TlsOffer {
  TlsVersion min_offered = TlsVersion::kTls10;
  TlsVersion max_offered = TlsVersion::kTls13;

  bool IsWellFormed() const { return min_offered <= max_offered; }
};

// nullopt means the handshake is rejected.
using TlsNegotiation = std::optional<TlsVersion>;

// Picks the highest version both sides accept: min(max_offered, highest
// supported), provided it is not below policy_min. Malformed offers are
// rejected.
TlsNegotiation NegotiateTls(TlsVersion policy_min, const TlsOffer& offer);

enum class Severity { kError, kWarning };
std::string_view ToString(Severity severity);

namespace finding {
// CheckHardening
inline constexpr char kCapRetained[] = "CAP_RETAINED";
inline constexpr char kPrivileged[] = "PRIVILEGED";
inline constexpr char kSecretOnPersistentPath[] = "SECRET_ON_PERSISTENT_PATH";
inline constexpr char kWritablePersistentMount[] = "WRITABLE_PERSISTENT_MOUNT";
inline constexpr char kTlsBelowMin[] = "TLS_BELOW_MIN";
// CheckExposure
inline constexpr char kUnexpectedAttachment[] = "UNEXPECTED_ATTACHMENT";
inline constexpr char kMissingAttachment[] = "MISSING_ATTACHMENT";
inline constexpr char kUnexpectedPort[] = "UNEXPECTED_PORT";
inline constexpr char kMissingPort[] = "MISSING_PORT";
inline constexpr char kUnexpectedService[] = "UNEXPECTED_SERVICE";
inline constexpr char kMissingService[] = "MISSING_SERVICE";
}  // namespace finding

struct Finding {
  std::string code;
  std::string service;
  std::string detail;
  Severity severity = Severity::kError;

  friend auto operator<=>(const Finding&, const Finding&) = default;
};

struct HardeningOptions {
  // Capabilities a service may keep. Everything else must be dropped.
  std::set<std::string> allowed_capabilities;
  // Lowest acceptable policy TLS minimum.
  TlsVersion tls_floor = TlsVersion::kTls12;
};

// Static checks of the non-network controls, sorted by (code, service, detail).
//  CAP_RETAINED               a retained capability outside the allow-set
//  PRIVILEGED                 privileged container
//  SECRET_ON_PERSISTENT_PATH  file secret whose innermost covering mount is
//                             writable-persistent, or that no mount covers
//                             (the container's writable layer)
//  WRITABLE_PERSISTENT_MOUNT  (warning) a writable-persistent mount encloses a
//                             secret path even though a tighter mount governs it
//  TLS_BELOW_MIN              policy TLS minimum below options.tls_floor
std::vector<Finding> CheckHardening(const IsolationPolicy& policy,
                                    const HardeningOptions& options = {});

// What a runtime reports for one container.
struct ObservedService {
  std::string service;
  std::vector<std::string> attachments;
  std::vector<PortBinding> published_ports;

  friend bool operator==(const ObservedService&, const ObservedService&) = default;
};

// The exposure the policy declares, in the observed shape.
std::vector<ObservedService> DeclaredExposure(const IsolationPolicy& policy);

// Exact-match comparison of observed against declared attachments and host
// ports. Empty iff they agree for every service.
std::vector<Finding> CheckExposure(const IsolationPolicy& policy,
                                   const std::vector<ObservedService>& observed);

}  // namespace warden

#endif  // WARDEN_HARDENING_H_
