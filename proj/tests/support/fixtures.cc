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

#include "support/fixtures.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "warden/policy_io.h"

namespace warden::testing {

std::string FixturePath(const std::string& name) {
  return std::string(WARDEN_FIXTURE_DIR) + "/" + name;
}

std::string ReadFixture(const std::string& name) {
  std::ifstream in(FixturePath(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const IsolationPolicy& ReferencePolicy() {
  static const IsolationPolicy kPolicy = ParsePolicy(ReadFixture("reference_policy.json"));
  return kPolicy;
}

IpAddress Ip(const char* text) {
  auto ip = IpAddress::Parse(text);
  if (!ip) throw std::invalid_argument(text);
  return *ip;
}

Cidr Net(const char* text) {
  auto cidr = Cidr::Parse(text);
  if (!cidr) throw std::invalid_argument(text);
  return *cidr;
}

Endpoint RefEndpoint(const std::string& service, const std::string& zone) {
  auto ep = FindEndpoint(ResolveEndpoints(ReferencePolicy()), service, zone);
  if (!ep) throw std::invalid_argument(service + "@" + zone);
  return *ep;
}

ConnectionEvent Event(const std::string& service, const char* src_ip, const char* dst_ip,
                      std::optional<int> port, Protocol proto, FlowState state,
                      int64_t ts) {
  ConnectionEvent e;
  e.ts = ts;
  e.src_service = service;
  e.src_ip = Ip(src_ip);
  e.dst_ip = Ip(dst_ip);
  e.dst_port = port;
  e.proto = proto;
  e.state = state;
  return e;
}

}  // namespace warden::testing
