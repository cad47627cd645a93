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

#ifndef WARDEN_POLICY_IO_H_
#define WARDEN_POLICY_IO_H_

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "warden/policy.h"

namespace warden {

struct ParseOptions {
  // Reject keys the schema does not define (UnknownFieldError).
  bool strict = true;
};

// Parses the JSON policy document. CIDRs are canonicalized; semantic checks
// are left to ValidatePolicy. Throws SyntaxError / UnknownFieldError.
IsolationPolicy ParsePolicy(std::string_view document,
                            const ParseOptions& options = {});

nlohmann::json PolicyToJson(const IsolationPolicy& policy);

// Pretty-printed document that ParsePolicy accepts.
std::string RenderPolicy(const IsolationPolicy& policy);

// Compact, key-sorted JSON. Equal policies give equal bytes.
std::string CanonicalPolicyJson(const IsolationPolicy& policy);

// Lowercase hex SHA-256 of CanonicalPolicyJson.
std::string PolicyDigest(const IsolationPolicy& policy);

std::string Sha256Hex(std::string_view data);

}  // namespace warden

#endif  // WARDEN_POLICY_IO_H_
