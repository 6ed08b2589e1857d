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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace oxp {

/// Switch identifier, e.g. "AMS".
class DeviceId {
public:
    DeviceId() = default;
    explicit DeviceId(std::string name) : name_(std::move(name)) {}

    const std::string& str() const noexcept { return name_; }
    bool empty() const noexcept { return name_.empty(); }

    auto operator<=>(const DeviceId&) const = default;
    bool operator==(const DeviceId&) const = default;

private:
    std::string name_;
};

inline std::ostream& operator<<(std::ostream& os, const DeviceId& id) { return os << id.str(); }

using PortNumber = std::uint32_t;
using VlanId = std::uint16_t;

constexpr VlanId kMinVlan = 1;
constexpr VlanId kMaxVlan = 4094;

constexpr bool is_valid_vlan(long v) noexcept { return v >= kMinVlan && v <= kMaxVlan; }

/// Throws Error(Validation) unless v is in 1..4094.
VlanId checked_vlan(long v);

/// A (device, port) attachment point. String form is "DEVICE/PORT".
struct ConnectPoint {
    DeviceId device;
    PortNumber port = 0;

    static ConnectPoint parse(std::string_view text);
    std::string to_string() const;

    auto operator<=>(const ConnectPoint&) const = default;
    bool operator==(const ConnectPoint&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const ConnectPoint& cp) { return os << cp.to_string(); }

struct MacAddress {
    std::uint64_t value = 0;  // low 48 bits

    static MacAddress parse(std::string_view text);
    std::string to_string() const;

    auto operator<=>(const MacAddress&) const = default;
};

struct Ipv4Address {
    std::uint32_t value = 0;  // host byte order

    static Ipv4Address parse(std::string_view text);
    std::string to_string() const;

    auto operator<=>(const Ipv4Address&) const = default;
};

/// CIDR prefix; host bits are always zero.
class Ipv4Prefix {
public:
    Ipv4Prefix() = default;
    Ipv4Prefix(Ipv4Address address, int length);

    static Ipv4Prefix parse(std::string_view text);
    static Ipv4Prefix host(Ipv4Address address) { return {address, 32}; }

    Ipv4Address network() const noexcept { return network_; }
    int length() const noexcept { return length_; }
    bool contains(Ipv4Address address) const noexcept;
    std::string to_string() const;

    auto operator<=>(const Ipv4Prefix&) const = default;

private:
    static std::uint32_t mask(int length) noexcept {
        return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length);
    }

    Ipv4Address network_{};
    int length_ = 0;
};

} // namespace oxp
