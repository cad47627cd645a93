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

#ifndef WARDEN_IP_H_
#define WARDEN_IP_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace warden {

enum class IpFamily { kV4, kV6 };

// An IPv4 or IPv6 address. IPv4 addresses occupy the first four bytes.
class IpAddress {
 public:
  IpAddress() = default;

  static std::optional<IpAddress> Parse(std::string_view text);
  static IpAddress V4(uint32_t host_order);
  // IPv4 uses the first four bytes; the rest must be zero.
  static IpAddress FromBytes(IpFamily family,
                             const std::array<uint8_t, 16>& bytes);

  IpFamily family() const { return family_; }
  bool is_v4() const { return family_ == IpFamily::kV4; }
  int bit_width() const { return is_v4() ? 32 : 128; }
  const std::array<uint8_t, 16>& bytes() const { return bytes_; }

  // Value of bit `index`, counted from the most significant bit.
  bool bit(int index) const;

  // this + delta, or nullopt when the result leaves the address space.
  std::optional<IpAddress> Offset(int64_t delta) const;

  std::string ToString() const;

  friend auto operator<=>(const IpAddress&, const IpAddress&) = default;

 private:
  IpFamily family_ = IpFamily::kV4;
  std::array<uint8_t, 16> bytes_{};
};

// A network prefix in canonical form (host bits cleared).
class Cidr {
 public:
  Cidr() = default;
  // Throws std::invalid_argument when prefix_len is out of range for the
  // address family. Host bits of `address` are masked off.
  Cidr(const IpAddress& address, int prefix_len);

  static Cidr Host(const IpAddress& address);
  // Accepts "a.b.c.d/n", "x::y/n" or a bare address (host prefix).
  static std::optional<Cidr> Parse(std::string_view text);

  const IpAddress& network() const { return network_; }
  int prefix_len() const { return prefix_len_; }
  IpFamily family() const { return network_.family(); }
  bool is_host() const { return prefix_len_ == network_.bit_width(); }

  bool Contains(const IpAddress& ip) const;
  bool Contains(const Cidr& other) const;
  bool Overlaps(const Cidr& other) const;

  // network + offset if that address is still inside the prefix.
  std::optional<IpAddress> HostAt(uint64_t offset) const;

  // Always "<network>/<len>", including host prefixes.
  std::string ToString() const;

  friend auto operator<=>(const Cidr&, const Cidr&) = default;

 private:
  IpAddress network_;
  int prefix_len_ = 32;
};

// RFC 1918, IPv6 ULA (fc00::/7) and loopback.
bool IsPrivateIp(const IpAddress& ip);
// True when every address of the prefix is private.
bool IsPrivateCidr(const Cidr& cidr);

}  // namespace warden

#endif  // WARDEN_IP_H_
