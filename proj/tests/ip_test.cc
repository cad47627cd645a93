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

#include <gtest/gtest.h>

#include "support/fixtures.h"
#include "support/generators.h"
#include "warden/ip.h"

namespace warden {
namespace {

using testing::Ip;
using testing::Net;

TEST(IpAddress, ParsesAndFormatsV4) {
  auto ip = IpAddress::Parse("172.28.0.4");
  ASSERT_TRUE(ip);
  EXPECT_TRUE(ip->is_v4());
  EXPECT_EQ(ip->ToString(), "172.28.0.4");
  EXPECT_EQ(*ip, IpAddress::V4(0xAC1C0004));
}

TEST(IpAddress, ParsesAndFormatsV6) {
  auto ip = IpAddress::Parse("fd00:0:0::1");
  ASSERT_TRUE(ip);
  EXPECT_FALSE(ip->is_v4());
  EXPECT_EQ(ip->ToString(), "fd00::1");
}

TEST(IpAddress, RejectsGarbage) {
  for (const char* bad : {"", "1.2.3", "256.1.1.1", "1.2.3.4.5", "a.b.c.d", "1.2.3.4/24",
                          " 1.2.3.4", "::g"}) {
    EXPECT_FALSE(IpAddress::Parse(bad)) << bad;
  }
}

TEST(IpAddress, OffsetStaysInFamily) {
  EXPECT_EQ(Ip("10.0.5.10").Offset(1), Ip("10.0.5.11"));
  EXPECT_EQ(Ip("10.0.5.10").Offset(-1), Ip("10.0.5.9"));
  EXPECT_EQ(Ip("10.0.0.255").Offset(1), Ip("10.0.1.0"));
  EXPECT_FALSE(Ip("255.255.255.255").Offset(1));
  EXPECT_FALSE(Ip("0.0.0.0").Offset(-1));
}

TEST(Cidr, CanonicalizesHostBits) {
  EXPECT_EQ(Net("172.28.0.1/24").ToString(), "172.28.0.0/24");
  EXPECT_EQ(Net("10.9.8.7/8").ToString(), "10.0.0.0/8");
  EXPECT_EQ(Net("10.0.5.10").ToString(), "10.0.5.10/32");
  EXPECT_EQ(Net("fd12:3456::1/16").ToString(), "fd12::/16");
}

TEST(Cidr, RejectsBadPrefix) {
  EXPECT_FALSE(Cidr::Parse("10.0.0.0/33"));
  EXPECT_FALSE(Cidr::Parse("10.0.0.0/-1"));
  EXPECT_FALSE(Cidr::Parse("fd00::/129"));
  EXPECT_FALSE(Cidr::Parse("10.0.0.0/"));
  EXPECT_THROW(Cidr(Ip("10.0.0.0"), 40), std::invalid_argument);
}

TEST(Cidr, Containment) {
  const Cidr core = Net("172.28.0.0/24");
  EXPECT_TRUE(core.Contains(Ip("172.28.0.0")));
  EXPECT_TRUE(core.Contains(Ip("172.28.0.255")));
  EXPECT_FALSE(core.Contains(Ip("172.28.1.0")));
  EXPECT_FALSE(core.Contains(Ip("fd00::1")));
  EXPECT_TRUE(Net("0.0.0.0/0").Contains(Ip("8.8.8.8")));
  EXPECT_TRUE(Net("10.0.0.0/8").Contains(Net("10.20.0.0/16")));
  EXPECT_FALSE(Net("10.20.0.0/16").Contains(Net("10.0.0.0/8")));
  EXPECT_TRUE(Net("10.20.0.0/16").Overlaps(Net("10.0.0.0/8")));
  EXPECT_FALSE(Net("10.20.0.0/16").Overlaps(Net("10.21.0.0/16")));
  EXPECT_TRUE(Net("172.28.0.0/27").Contains(Ip("172.28.0.31")));
  EXPECT_FALSE(Net("172.28.0.0/27").Contains(Ip("172.28.0.32")));
}

TEST(Cidr, HostAtRespectsPrefix) {
  EXPECT_EQ(Net("172.28.0.0/24").HostAt(10), Ip("172.28.0.10"));
  EXPECT_FALSE(Net("172.28.0.0/29").HostAt(8));
  EXPECT_EQ(Net("172.28.0.0/29").HostAt(7), Ip("172.28.0.7"));
}

TEST(IsPrivateIp, SpecifiedRanges) {
  EXPECT_TRUE(IsPrivateIp(Ip("10.1.2.3")));
  EXPECT_FALSE(IsPrivateIp(Ip("172.32.0.1")));
  EXPECT_FALSE(IsPrivateIp(Ip("8.8.8.8")));
  EXPECT_TRUE(IsPrivateIp(Ip("172.16.0.0")));
  EXPECT_TRUE(IsPrivateIp(Ip("172.31.255.255")));
  EXPECT_FALSE(IsPrivateIp(Ip("172.15.255.255")));
  EXPECT_TRUE(IsPrivateIp(Ip("192.168.0.1")));
  EXPECT_FALSE(IsPrivateIp(Ip("192.169.0.1")));
  EXPECT_TRUE(IsPrivateIp(Ip("127.0.0.1")));
  EXPECT_TRUE(IsPrivateIp(Ip("fc00::1")));
  EXPECT_TRUE(IsPrivateIp(Ip("fdff::1")));
  EXPECT_FALSE(IsPrivateIp(Ip("fe80::1")));
  EXPECT_TRUE(IsPrivateIp(Ip("::1")));
  EXPECT_FALSE(IsPrivateIp(Ip("2001:4860:4860::8888")));
}

TEST(IsPrivateCidr, WholePrefixMustBePrivate) {
  EXPECT_TRUE(IsPrivateCidr(Net("172.16.0.0/12")));
  EXPECT_FALSE(IsPrivateCidr(Net("172.0.0.0/8")));
  EXPECT_FALSE(IsPrivateCidr(Net("0.0.0.0/0")));
  EXPECT_TRUE(IsPrivateCidr(Net("fd00::/8")));
}

// Independent reference: the first octets decide privacy for IPv4.
bool ReferencePrivateV4(uint32_t v) {
  const uint32_t a = v >> 24, b = (v >> 16) & 0xFF;
  return a == 10 || a == 127 || (a == 172 && b >= 16 && b <= 31) || (a == 192 && b == 168);
}

TEST(IsPrivateIp, MatchesOctetReferenceOnRandomAddresses) {
  testing::Rng rng(7);
  for (int i = 0; i < 200000; ++i) {
    const uint32_t v = static_cast<uint32_t>(rng());
    ASSERT_EQ(IsPrivateIp(IpAddress::V4(v)), ReferencePrivateV4(v)) << IpAddress::V4(v).ToString();
  }
}

TEST(Cidr, ContainsMatchesBitwiseReference) {
  testing::Rng rng(11);
  for (int i = 0; i < 100000; ++i) {
    const uint32_t net = static_cast<uint32_t>(rng());
    const int len = static_cast<int>(rng() % 33);
    const uint32_t probe = static_cast<uint32_t>(rng()) ^ (rng() % 2 ? 0 : net);
    const uint32_t mask = len == 0 ? 0 : ~uint32_t{0} << (32 - len);
    const Cidr c(IpAddress::V4(net), len);
    ASSERT_EQ(c.network(), IpAddress::V4(net & mask));
    ASSERT_EQ(c.Contains(IpAddress::V4(probe)), (probe & mask) == (net & mask));
  }
}

}  // namespace
}  // namespace warden
