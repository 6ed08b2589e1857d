/*
 * Copyright 2026 The OXP Controller Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oxp/net_types.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstdio>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Validation: return "VALIDATION";
    case ErrorCode::Conflict: return "CONFLICT";
    case ErrorCode::Isolation: return "ISOLATION";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::NoPath: return "NO_PATH";
    case ErrorCode::Unavailable: return "UNAVAILABLE";
    case ErrorCode::Parse: return "PARSE";
    }
    return "UNKNOWN";
}

namespace {

template <typename T>
bool parse_number(std::string_view text, T& out)
{
    if (text.empty())
        return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace

VlanId checked_vlan(long v)
{
    if (!is_valid_vlan(v))
        throw Error(ErrorCode::Validation, "VLAN id " + std::to_string(v) + " out of range 1-4094",
                    std::to_string(v));
    return static_cast<VlanId>(v);
}

ConnectPoint ConnectPoint::parse(std::string_view text)
{
    auto slash = text.rfind('/');
    PortNumber port = 0;
    if (slash == std::string_view::npos || slash == 0 ||
        !parse_number(text.substr(slash + 1), port) || port == 0) {
        throw Error(ErrorCode::Validation,
                    "malformed connect point '" + std::string(text) + "', expected DEVICE/PORT",
                    std::string(text));
    }
    return ConnectPoint{DeviceId(std::string(text.substr(0, slash))), port};
}

std::string ConnectPoint::to_string() const
{
    return device.str() + "/" + std::to_string(port);
}

MacAddress MacAddress::parse(std::string_view text)
{
    unsigned b[6];
    char tail;
    std::string s(text);
    if (std::sscanf(s.c_str(), "%2x:%2x:%2x:%2x:%2x:%2x%c", &b[0], &b[1], &b[2], &b[3], &b[4], &b[5],
                    &tail) != 6)
        throw Error(ErrorCode::Validation, "malformed MAC address '" + s + "'", s);
    std::uint64_t v = 0;
    for (unsigned byte : b)
        v = (v << 8) | byte;
    return MacAddress{v};
}

std::string MacAddress::to_string() const
{
    char buf[18];
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                  unsigned(value >> 40) & 0xff, unsigned(value >> 32) & 0xff,
                  unsigned(value >> 24) & 0xff, unsigned(value >> 16) & 0xff,
                  unsigned(value >> 8) & 0xff, unsigned(value) & 0xff);
    return buf;
}

Ipv4Address Ipv4Address::parse(std::string_view text)
{
    std::string s(text);
    in_addr addr{};
    if (inet_pton(AF_INET, s.c_str(), &addr) != 1)
        throw Error(ErrorCode::Validation, "malformed IPv4 address '" + s + "'", s);
    return Ipv4Address{ntohl(addr.s_addr)};
}

std::string Ipv4Address::to_string() const
{
    in_addr addr{htonl(value)};
    char buf[INET_ADDRSTRLEN];
    inet_ntop(AF_INET, &addr, buf, sizeof buf);
    return buf;
}

Ipv4Prefix::Ipv4Prefix(Ipv4Address address, int length)
{
    if (length < 0 || length > 32)
        throw Error(ErrorCode::Validation, "prefix length " + std::to_string(length) + " out of range 0-32");
    length_ = length;
    network_ = Ipv4Address{address.value & mask(length)};
}

Ipv4Prefix Ipv4Prefix::parse(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return host(Ipv4Address::parse(text));
    int length = -1;
    if (!parse_number(text.substr(slash + 1), length))
        throw Error(ErrorCode::Validation, "malformed prefix '" + std::string(text) + "'", std::string(text));
    return Ipv4Prefix(Ipv4Address::parse(text.substr(0, slash)), length);
}

bool Ipv4Prefix::contains(Ipv4Address address) const noexcept
{
    return (address.value & mask(length_)) == network_.value;
}

std::string Ipv4Prefix::to_string() const
{
    return network_.to_string() + "/" + std::to_string(length_);
}

} // namespace oxp
