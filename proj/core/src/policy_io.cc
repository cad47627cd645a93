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

#include "warden/policy_io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <initializer_list>
#include <memory>

#include "warden/error.h"

namespace warden {
namespace {

using nlohmann::json;

int LineOfOffset(std::string_view text, size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Typed access to one JSON object, remembering its path for error messages.
class ObjectReader {
 public:
  ObjectReader(const json& value, std::string path, const ParseOptions& options,
               std::initializer_list<std::string_view> known)
      : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) Fail("expected an object");
    if (!options.strict) return;
    for (const auto& [key, _] : value_.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw UnknownFieldError(path_ + "/" + key);
      }
    }
  }

  bool Has(std::string_view key) const { return value_.contains(key); }

  const json& Get(std::string_view key) const {
    auto it = value_.find(key);
    if (it == value_.end()) {
      Fail("missing required key \"" + std::string(key) + "\"");
    }
    return *it;
  }

  std::string Path(std::string_view key) const {
    return path_ + "/" + std::string(key);
  }

  std::string String(std::string_view key) const {
    const json& v = Get(key);
    if (!v.is_string()) FailAt(key, "expected a string");
    return v.get<std::string>();
  }

  int Int(std::string_view key) const {
    const json& v = Get(key);
    if (!v.is_number_integer()) FailAt(key, "expected an integer");
    const auto n = v.get<int64_t>();
    if (n < INT32_MIN || n > INT32_MAX) FailAt(key, "integer out of range");
    return static_cast<int>(n);
  }

  bool Bool(std::string_view key, std::optional<bool> fallback = {}) const {
    if (!Has(key) && fallback) return *fallback;
    const json& v = Get(key);
    if (!v.is_boolean()) FailAt(key, "expected a boolean");
    return v.get<bool>();
  }

  const json& Array(std::string_view key, bool required = true) const {
    static const json kEmpty = json::array();
    if (!required && !Has(key)) return kEmpty;
    const json& v = Get(key);
    if (!v.is_array()) FailAt(key, "expected an array");
    return v;
  }

  Cidr CidrAt(std::string_view key) const {
    auto cidr = Cidr::Parse(String(key));
    if (!cidr) FailAt(key, "invalid CIDR");
    return *cidr;
  }

  IpAddress IpAt(std::string_view key) const {
    auto ip = IpAddress::Parse(String(key));
    if (!ip) FailAt(key, "invalid IP address");
    return *ip;
  }

  Protocol TransportAt(std::string_view key) const {
    auto proto = ParseProtocol(String(key));
    if (!proto || (*proto != Protocol::kTcp && *proto != Protocol::kUdp)) {
      FailAt(key, "expected \"tcp\" or \"udp\"");
    }
    return *proto;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw SyntaxError(0, (path_.empty() ? "/" : path_) + ": " + message);
  }
  [[noreturn]] void FailAt(std::string_view key, const std::string& message) const {
    throw SyntaxError(0, Path(key) + ": " + message);
  }

 private:
  const json& value_;
  std::string path_;
};

std::string StringElement(const json& v, const std::string& path) {
  if (!v.is_string()) throw SyntaxError(0, path + ": expected a string");
  return v.get<std::string>();
}

HardeningSpec ParseHardening(const json& value, const std::string& path,
                             const ParseOptions& options) {
  ObjectReader r(value, path, options,
                 {"retained_capabilities", "mounts", "secrets", "privileged"});
  HardeningSpec spec;
  const json& caps = r.Array("retained_capabilities", false);
  for (size_t i = 0; i < caps.size(); ++i) {
    spec.retained_capabilities.insert(StringElement(
        caps[i], r.Path("retained_capabilities") + "/" + std::to_string(i)));
  }
  const json& mounts = r.Array("mounts", false);
  for (size_t i = 0; i < mounts.size(); ++i) {
    ObjectReader m(mounts[i], r.Path("mounts") + "/" + std::to_string(i),
                   options, {"path", "mode"});
    auto mode = ParseMountMode(m.String("mode"));
    if (!mode) m.FailAt("mode", "unknown mount mode");
    spec.mounts.push_back({m.String("path"), *mode});
  }
  const json& secrets = r.Array("secrets", false);
  for (size_t i = 0; i < secrets.size(); ++i) {
    ObjectReader s(secrets[i], r.Path("secrets") + "/" + std::to_string(i),
                   options, {"name", "delivery", "path"});
    Secret secret{s.String("name"), std::nullopt};
    const std::string delivery = s.String("delivery");
    if (delivery == "file") {
      secret.file_path = s.String("path");
    } else if (delivery != "in_memory") {
      s.FailAt("delivery", "expected \"in_memory\" or \"file\"");
    } else if (s.Has("path")) {
      s.FailAt("path", "in-memory secrets take no path");
    }
    spec.secrets.push_back(std::move(secret));
  }
  spec.privileged = r.Bool("privileged", false);
  return spec;
}

IsolationPolicy FromJson(const json& doc, const ParseOptions& options) {
  ObjectReader root(doc, "", options,
                    {"zones", "services", "service_links", "airlocks",
                     "ingress", "tls"});
  IsolationPolicy policy;

  const json& zones = root.Array("zones");
  for (size_t i = 0; i < zones.size(); ++i) {
    ObjectReader z(zones[i], "/zones/" + std::to_string(i), options,
                   {"name", "kind", "subnet", "routed_gateway"});
    auto kind = ParseZoneKind(z.String("kind"));
    if (!kind) z.FailAt("kind", "unknown zone kind");
    policy.zones.push_back(
        {z.String("name"), *kind, z.CidrAt("subnet"), z.Bool("routed_gateway", false)});
  }

  const json& services = root.Array("services");
  for (size_t i = 0; i < services.size(); ++i) {
    const std::string path = "/services/" + std::to_string(i);
    ObjectReader s(services[i], path, options,
                   {"name", "attachments", "published_ports", "hardening",
                    "addresses"});
    ServiceSpec spec;
    spec.name = s.String("name");
    const json& attachments = s.Array("attachments");
    for (size_t j = 0; j < attachments.size(); ++j) {
      spec.attachments.push_back(StringElement(
          attachments[j], s.Path("attachments") + "/" + std::to_string(j)));
    }
    const json& ports = s.Array("published_ports", false);
    for (size_t j = 0; j < ports.size(); ++j) {
      ObjectReader p(ports[j], s.Path("published_ports") + "/" + std::to_string(j),
                     options, {"port", "proto"});
      spec.published_ports.push_back({p.Int("port"), p.TransportAt("proto")});
    }
    if (s.Has("hardening")) {
      spec.hardening = ParseHardening(s.Get("hardening"), s.Path("hardening"), options);
    }
    if (s.Has("addresses")) {
      const json& addresses = s.Get("addresses");
      if (!addresses.is_object()) s.FailAt("addresses", "expected an object");
      for (const auto& [zone, ip_text] : addresses.items()) {
        auto ip = IpAddress::Parse(
            StringElement(ip_text, s.Path("addresses") + "/" + zone));
        if (!ip) s.FailAt("addresses", "invalid IP address for zone " + zone);
        spec.addresses.emplace(zone, *ip);
      }
    }
    policy.services.push_back(std::move(spec));
  }

  const json& links = root.Array("service_links", false);
  for (size_t i = 0; i < links.size(); ++i) {
    ObjectReader l(links[i], "/service_links/" + std::to_string(i), options,
                   {"from", "to", "port", "proto"});
    policy.service_links.push_back(
        {l.String("from"), l.String("to"), l.Int("port"), l.TransportAt("proto")});
  }

  const json& airlocks = root.Array("airlocks", false);
  for (size_t i = 0; i < airlocks.size(); ++i) {
    ObjectReader a(airlocks[i], "/airlocks/" + std::to_string(i), options,
                   {"name", "from_service", "via_zone", "target_ip",
                    "target_port", "proto", "require_upstream_tls_verification"});
    policy.airlocks.push_back({a.String("name"), a.String("from_service"),
                               a.String("via_zone"), a.IpAt("target_ip"),
                               a.Int("target_port"), a.TransportAt("proto"),
                               a.Bool("require_upstream_tls_verification")});
  }

  const json& ingress = root.Array("ingress", false);
  for (size_t i = 0; i < ingress.size(); ++i) {
    ObjectReader g(ingress[i], "/ingress/" + std::to_string(i), options,
                   {"source", "to_service", "port", "proto"});
    policy.ingress.push_back({g.CidrAt("source"), g.String("to_service"),
                              g.Int("port"), g.TransportAt("proto")});
  }

  if (root.Has("tls")) {
    ObjectReader t(root.Get("tls"), "/tls", options, {"min_version"});
    auto version = ParseTlsVersion(t.String("min_version"));
    if (!version) t.FailAt("min_version", "expected one of 1.0, 1.1, 1.2, 1.3");
    policy.tls.min_version = *version;
  }
  return policy;
}

}  // namespace

IsolationPolicy ParsePolicy(std::string_view document, const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(LineOfOffset(document, e.byte == 0 ? 0 : e.byte - 1),
                      "malformed JSON");
  }
  return FromJson(doc, options);
}

nlohmann::json PolicyToJson(const IsolationPolicy& policy) {
  json doc = json::object();
  json& zones = doc["zones"] = json::array();
  for (const Zone& z : policy.zones) {
    zones.push_back({{"name", z.name},
                     {"kind", ToString(z.kind)},
                     {"subnet", z.subnet.ToString()},
                     {"routed_gateway", z.routed_gateway}});
  }
  json& services = doc["services"] = json::array();
  for (const ServiceSpec& s : policy.services) {
    json ports = json::array();
    for (const PortBinding& p : s.published_ports) {
      ports.push_back({{"port", p.port}, {"proto", ToString(p.proto)}});
    }
    json mounts = json::array();
    for (const Mount& m : s.hardening.mounts) {
      mounts.push_back({{"path", m.path}, {"mode", ToString(m.mode)}});
    }
    json secrets = json::array();
    for (const Secret& secret : s.hardening.secrets) {
      json entry = {{"name", secret.name}};
      if (secret.file_path) {
        entry["delivery"] = "file";
        entry["path"] = *secret.file_path;
      } else {
        entry["delivery"] = "in_memory";
      }
      secrets.push_back(std::move(entry));
    }
    json addresses = json::object();
    for (const auto& [zone, ip] : s.addresses) addresses[zone] = ip.ToString();
    services.push_back(
        {{"name", s.name},
         {"attachments", s.attachments},
         {"published_ports", std::move(ports)},
         {"hardening",
          {{"retained_capabilities", s.hardening.retained_capabilities},
           {"mounts", std::move(mounts)},
           {"secrets", std::move(secrets)},
           {"privileged", s.hardening.privileged}}},
         {"addresses", std::move(addresses)}});
  }
  json& links = doc["service_links"] = json::array();
  for (const ServiceLink& l : policy.service_links) {
    links.push_back({{"from", l.from_service},
                     {"to", l.to_service},
                     {"port", l.dest_port},
                     {"proto", ToString(l.proto)}});
  }
  json& airlocks = doc["airlocks"] = json::array();
  for (const Airlock& a : policy.airlocks) {
    airlocks.push_back(
        {{"name", a.name},
         {"from_service", a.from_service},
         {"via_zone", a.via_zone},
         {"target_ip", a.target_ip.ToString()},
         {"target_port", a.target_port},
         {"proto", ToString(a.proto)},
         {"require_upstream_tls_verification", a.require_upstream_tls_verification}});
  }
  json& ingress = doc["ingress"] = json::array();
  for (const IngressRule& g : policy.ingress) {
    ingress.push_back({{"source", g.source.ToString()},
                       {"to_service", g.to_service},
                       {"port", g.dest_port},
                       {"proto", ToString(g.proto)}});
  }
  doc["tls"] = {{"min_version", ToString(policy.tls.min_version)}};
  return doc;
}

std::string RenderPolicy(const IsolationPolicy& policy) {
  return PolicyToJson(policy).dump(2) + "\n";
}

std::string CanonicalPolicyJson(const IsolationPolicy& policy) {
  return PolicyToJson(policy).dump();
}

std::string PolicyDigest(const IsolationPolicy& policy) {
  return Sha256Hex(CanonicalPolicyJson(policy));
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx.get(), data.data(), data.size());
  EVP_DigestFinal_ex(ctx.get(), digest, &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace warden
