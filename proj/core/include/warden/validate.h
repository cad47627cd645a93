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

#ifndef WARDEN_VALIDATE_H_
#define WARDEN_VALIDATE_H_

#include <string>
#include <vector>

#include "warden/policy.h"

namespace warden {

// Stable violation codes.
namespace violation {
inline constexpr char kDuplicateName[] = "DUPLICATE_NAME";
inline constexpr char kZoneCardinality[] = "ZONE_CARDINALITY";
inline constexpr char kInternalRouted[] = "INTERNAL_ROUTED";
inline constexpr char kZoneNotPrivate[] = "ZONE_NOT_PRIVATE";
inline constexpr char kZoneOverlap[] = "ZONE_OVERLAP";
inline constexpr char kUnknownZone[] = "UNKNOWN_ZONE";
inline constexpr char kUnknownService[] = "UNKNOWN_SERVICE";
inline constexpr char kNoAttachments[] = "NO_ATTACHMENTS";
inline constexpr char kDuplicateAttachment[] = "DUPLICATE_ATTACHMENT";
inline constexpr char kDuplicatePublishedPort[] = "DUPLICATE_PUBLISHED_PORT";
inline constexpr char kInvalidPort[] = "INVALID_PORT";
inline constexpr char kInvalidProto[] = "INVALID_PROTO";
inline constexpr char kEndpointOutsideSubnet[] = "ENDPOINT_OUTSIDE_SUBNET";
inline constexpr char kDuplicateAddress[] = "DUPLICATE_ADDRESS";
inline constexpr char kLinkNoSharedZone[] = "LINK_NO_SHARED_ZONE";
inline constexpr char kDuplicateLink[] = "DUPLICATE_LINK";
inline constexpr char kDuplicateIngress[] = "DUPLICATE_INGRESS";
inline constexpr char kAirlockPublicTarget[] = "AIRLOCK_PUBLIC_TARGET";
inline constexpr char kAirlockTargetInTopology[] = "AIRLOCK_TARGET_IN_TOPOLOGY";
inline constexpr char kAirlockZoneNotEgress[] = "AIRLOCK_ZONE_NOT_EGRESS";
inline constexpr char kAirlockServiceNotAttached[] = "AIRLOCK_SERVICE_NOT_ATTACHED";
inline constexpr char kAirlockZoneShared[] = "AIRLOCK_ZONE_SHARED";
inline constexpr char kIngressNotDmz[] = "INGRESS_NOT_DMZ";
inline constexpr char kPrivilegedContainer[] = "PRIVILEGED_CONTAINER";
}  // namespace violation

struct Violation {
  std::string code;
  std::string subject;
  std::string message;

  friend auto operator<=>(const Violation&, const Violation&) = default;
};

// Every structural invariant of the policy model, collected exhaustively and
// sorted by (code, subject, message). Empty means the policy is valid.
//
// Beyond the per-type invariants this also requires:
//  - zone subnets are pairwise disjoint and every endpoint address is unique,
//    so an address names exactly one (service, zone);
//  - an egress DMZ that carries airlocks is attached only by the service
//    owning those airlocks, so its subnet identifies that service;
//  - airlock targets lie outside every zone subnet.
std::vector<Violation> ValidatePolicy(const IsolationPolicy& policy);

// Throws InvalidPolicyError listing the violations, if any.
void RequireValid(const IsolationPolicy& policy);

}  // namespace warden

#endif  // WARDEN_VALIDATE_H_
