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

#ifndef WARDEN_TESTS_SUPPORT_FIXTURES_H_
#define WARDEN_TESTS_SUPPORT_FIXTURES_H_

#include <string>

#include "warden/monitor.h"
#include "warden/policy.h"

namespace warden::testing {

std::string FixturePath(const std::string& name);
std::string ReadFixture(const std::string& name);

// fixtures/reference_policy.json, parsed.
const IsolationPolicy& ReferencePolicy();

IpAddress Ip(const char* text);
Cidr Net(const char* text);

// Endpoint of `service` in `zone` under the reference policy.
Endpoint RefEndpoint(const std::string& service, const std::string& zone);

ConnectionEvent Event(const std::string& service, const char* src_ip, const char* dst_ip,
                      std::optional<int> port, Protocol proto = Protocol::kTcp,
                      FlowState state = FlowState::kNew, int64_t ts = 1751356800);

}  // namespace warden::testing

#endif  // WARDEN_TESTS_SUPPORT_FIXTURES_H_
