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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oxp/net_types.hpp"

namespace oxp {

enum class LinkState { Up, Down };
enum class DeviceState { Up, Down };

std::string_view to_string(LinkState s);
std::string_view to_string(DeviceState s);

struct Device {
    DeviceId id;
    PortNumber ports = 0;
    DeviceState state = DeviceState::Up;

    bool operator==(const Device&) const = default;
};

/// Bidirectional link with a single state.
struct Link {
    ConnectPoint a;
    ConnectPoint b;
    LinkState state = LinkState::Up;

    std::string name() const { return a.to_string() + "-" + b.to_string(); }
    bool touches(const DeviceId& d) const { return a.device == d || b.device == d; }
    bool operator==(const Link&) const = default;
};

struct Host {
    ConnectPoint cp;
    std::string name;
    std::string mac;
    std::string ip;

    bool operator==(const Host&) const = default;
};

/// One traversed link: leave `from`, arrive at `to`.
struct Hop {
    ConnectPoint from;
    ConnectPoint to;

    bool operator==(const Hop&) const = default;
};

using Path = std::vector<Hop>;

struct TopologyEvent {
    enum class Kind { LinkUp, LinkDown, DeviceUp, DeviceDown };

    Kind kind;
    std::optional<Link> link;       // LinkUp / LinkDown
    std::optional<DeviceId> device; // DeviceUp / DeviceDown
    std::uint64_t seq = 0;

    std::string subject() const;
};

std::string_view to_string(TopologyEvent::Kind k);

/// Either endpoint may name a device ("AMS") or a connect point ("AMS/3").
/// A device-only reference must resolve to exactly one link.
struct LinkRef {
    std::string a;
    std::string b;
};

class Topology {
public:
    void add_device(DeviceId id, PortNumber ports);
    void add_link(ConnectPoint a, ConnectPoint b);
    void add_host(Host host);

    const std::map<DeviceId, Device>& devices() const noexcept { return devices_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    const std::vector<Host>& hosts() const noexcept { return hosts_; }

    bool has_device(const DeviceId& id) const { return devices_.contains(id); }
    const Device& device(const DeviceId& id) const;
    bool device_up(const DeviceId& id) const;

    /// True iff the device exists and the port is within its port range.
    bool has_port(const ConnectPoint& cp) const;
    std::optional<std::size_t> link_at(const ConnectPoint& cp) const;
    bool is_link_port(const ConnectPoint& cp) const { return link_at(cp).has_value(); }
    /// An existing port that carries no link.
    bool is_edge_port(const ConnectPoint& cp) const { return has_port(cp) && !is_link_port(cp); }
    /// All edge connect points, sorted.
    std::vector<ConnectPoint> edge_ports() const;

    /// Link UP and both endpoint devices UP.
    bool link_usable(const Link& link) const;

    std::size_t find_link(const LinkRef& ref) const;

    std::vector<TopologyEvent> set_link_state(std::size_t link_index, LinkState state);
    std::vector<TopologyEvent> set_link_state(const LinkRef& ref, LinkState state)
    {
        return set_link_state(find_link(ref), state);
    }
    std::vector<TopologyEvent> set_device_state(const DeviceId& id, DeviceState state);

    /// Minimum-hop path over usable links. Among equal-hop paths the one whose
    /// device-name sequence is lexicographically smallest wins; parallel links
    /// are ordered by (from port, to port). Empty path for src == dst.
    std::optional<Path> shortest_path(const DeviceId& src, const DeviceId& dst) const;

    bool operator==(const Topology& other) const
    {
        return devices_ == other.devices_ && links_ == other.links_ && hosts_ == other.hosts_;
    }

private:
    void require_device(const DeviceId& id) const;

    std::map<DeviceId, Device> devices_;
    std::vector<Link> links_;
    std::vector<Host> hosts_;
    std::map<ConnectPoint, std::size_t> link_ports_;
    std::uint64_t next_seq_ = 1;
};

/// Sequence of device names visited by a path starting at src.
std::vector<DeviceId> path_devices(const DeviceId& src, const Path& path);

} // namespace oxp
