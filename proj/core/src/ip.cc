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

#include "warden/ip.h"

#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <stdexcept>

namespace warden {
namespace {

const Cidr& PrivateRange(int index) {
  static const Cidr kRanges[] = {
      *Cidr::Parse("10.0.0.0/8"),   *Cidr::Parse("172.16.0.0/12"),
      *Cidr::Parse("192.168.0.0/16"), *Cidr::Parse("127.0.0.0/8"),
      *Cidr::Parse("fc00::/7"),     *Cidr::Parse("::1/128"),
  };
  return kRanges[index];
}
constexpr int kPrivateRangeCount = 6;

}  // namespace

std::optional<IpAddress> IpAddress::Parse(std::string_view text) {
  std::string buf(text);
  IpAddress ip;
  if (buf.find(':') == std::string::npos) {
    in_addr v4;
    if (inet_pton(AF_INET, buf.c_str(), &v4) != 1) return std::nullopt;
    ip.family_ = IpFamily::kV4;
    std::memcpy(ip.bytes_.data(), &v4, 4);
    return ip;
  }
  in6_addr v6;
  if (inet_pton(AF_INET6, buf.c_str(), &v6) != 1) return std::nullopt;
  ip.family_ = IpFamily::kV6;
  std::memcpy(ip.bytes_.data(), &v6, 16);
  return ip;
}

IpAddress IpAddress::V4(uint32_t host_order) {
  IpAddress ip;
  ip.bytes_[0] = static_cast<uint8_t>(host_order >> 24);
  ip.bytes_[1] = static_cast<uint8_t>(host_order >> 16);
  ip.bytes_[2] = static_cast<uint8_t>(host_order >> 8);
  ip.bytes_[3] = static_cast<uint8_t>(host_order);
  return ip;
}

IpAddress IpAddress::FromBytes(IpFamily family,
                               const std::array<uint8_t, 16>& bytes) {
  IpAddress ip;
  ip.family_ = family;
  ip.bytes_ = bytes;
  return ip;
}

bool IpAddress::bit(int index) const {
  return (bytes_[index / 8] >> (7 - index % 8)) & 1;
}

std::optional<IpAddress> IpAddress::Offset(int64_t delta) const {
  IpAddress out = *this;
  const int width = bit_width() / 8;
  // Byte-wise add/subtract with carry, least significant byte first.
  uint64_t magnitude = delta < 0 ? static_cast<uint64_t>(-(delta + 1)) + 1
                                 : static_cast<uint64_t>(delta);
  const bool subtract = delta < 0;
  int carry = 0;
  for (int i = width - 1; i >= 0; --i) {
    int operand = static_cast<int>(magnitude & 0xff) + carry;
    magnitude >>= 8;
    int value = subtract ? out.bytes_[i] - operand : out.bytes_[i] + operand;
    if (value < 0) {
      value += 256;
      carry = 1;
    } else if (value > 255) {
      value -= 256;
      carry = 1;
    } else {
      carry = 0;
    }
    out.bytes_[i] = static_cast<uint8_t>(value);
  }
  if (carry != 0 || magnitude != 0) return std::nullopt;
  return out;
}

std::string IpAddress::ToString() const {
  char buf[INET6_ADDRSTRLEN];
  const int af = is_v4() ? AF_INET : AF_INET6;
  inet_ntop(af, bytes_.data(), buf, sizeof(buf));
  return buf;
}

Cidr::Cidr(const IpAddress& address, int prefix_len)
    : network_(address), prefix_len_(prefix_len) {
  if (prefix_len < 0 || prefix_len > address.bit_width()) {
    throw std::invalid_argument("prefix length " + std::to_string(prefix_len) +
                                " out of range for " + address.ToString());
  }
  std::array<uint8_t, 16> bytes = address.bytes();
  for (int i = 0; i < 16; ++i) {
    const int keep = std::clamp(prefix_len - i * 8, 0, 8);
    bytes[i] &= static_cast<uint8_t>(0xff00 >> keep);
  }
  network_ = IpAddress::FromBytes(address.family(), bytes);
}

Cidr Cidr::Host(const IpAddress& address) {
  return Cidr(address, address.bit_width());
}

std::optional<Cidr> Cidr::Parse(std::string_view text) {
  const auto slash = text.find('/');
  auto address = IpAddress::Parse(text.substr(0, slash));
  if (!address) return std::nullopt;
  if (slash == std::string_view::npos) return Host(*address);
  std::string_view len_text = text.substr(slash + 1);
  int len = -1;
  auto [ptr, ec] =
      std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  if (ec != std::errc() || ptr != len_text.data() + len_text.size() ||
      len_text.empty() || len < 0 || len > address->bit_width()) {
    return std::nullopt;
  }
  return Cidr(*address, len);
}

bool Cidr::Contains(const IpAddress& ip) const {
  if (ip.family() != family()) return false;
  const auto& a = ip.bytes();
  const auto& n = network_.bytes();
  const int full = prefix_len_ / 8;
  if (std::memcmp(a.data(), n.data(), full) != 0) return false;
  const int rest = prefix_len_ % 8;
  if (rest == 0) return true;
  const auto mask = static_cast<uint8_t>(0xff00 >> rest);
  return (a[full] & mask) == n[full];
}

bool Cidr::Contains(const Cidr& other) const {
  return other.family() == family() && other.prefix_len_ >= prefix_len_ &&
         Contains(other.network_);
}

bool Cidr::Overlaps(const Cidr& other) const {
  return Contains(other) || other.Contains(*this);
}

std::optional<IpAddress> Cidr::HostAt(uint64_t offset) const {
  if (offset > static_cast<uint64_t>(INT64_MAX)) return std::nullopt;
  auto ip = network_.Offset(static_cast<int64_t>(offset));
  if (!ip || !Contains(*ip)) return std::nullopt;
  return ip;
}

std::string Cidr::ToString() const {
  return network_.ToString() + "/" + std::to_string(prefix_len_);
}

bool IsPrivateIp(const IpAddress& ip) {
  for (int i = 0; i < kPrivateRangeCount; ++i) {
    if (PrivateRange(i).Contains(ip)) return true;
  }
  return false;
}

bool IsPrivateCidr(const Cidr& cidr) {
  for (int i = 0; i < kPrivateRangeCount; ++i) {
    if (PrivateRange(i).Contains(cidr)) return true;
  }
  return false;
}

}  // namespace warden
