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

#include "oxp/topology.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(LinkState s) { return s == LinkState::Up ? "UP" : "DOWN"; }
std::string_view to_string(DeviceState s) { return s == DeviceState::Up ? "UP" : "DOWN"; }

std::string_view to_string(TopologyEvent::Kind k)
{
    switch (k) {
    case TopologyEvent::Kind::LinkUp: return "LINK_UP";
    case TopologyEvent::Kind::LinkDown: return "LINK_DOWN";
    case TopologyEvent::Kind::DeviceUp: return "DEVICE_UP";
    case TopologyEvent::Kind::DeviceDown: return "DEVICE_DOWN";
    }
    return "UNKNOWN";
}

std::string TopologyEvent::subject() const
{
    if (link)
        return link->name();
    if (device)
        return device->str();
    return {};
}

void Topology::add_device(DeviceId id, PortNumber ports)
{
    if (id.empty())
        throw Error(ErrorCode::Validation, "device id must be non-empty");
    if (id.str().find('/') != std::string::npos)
        throw Error(ErrorCode::Validation, "device id '" + id.str() + "' must not contain '/'", id.str());
    if (ports == 0)
        throw Error(ErrorCode::Validation, "device " + id.str() + " must have at least one port", id.str());
    if (devices_.contains(id))
        throw Error(ErrorCode::Validation, "duplicate device " + id.str(), id.str());
    Device d{id, ports, DeviceState::Up};
    devices_.emplace(std::move(id), std::move(d));
}

void Topology::add_link(ConnectPoint a, ConnectPoint b)
{
    for (const auto* cp : {&a, &b}) {
        if (!devices_.contains(cp->device))
            throw Error(ErrorCode::Validation, "link endpoint refers to unknown device " + cp->device.str(),
                        cp->device.str());
        if (!has_port(*cp))
            throw Error(ErrorCode::Validation, "link endpoint " + cp->to_string() + " is not a valid port",
                        cp->to_string());
        if (link_ports_.contains(*cp))
            throw Error(ErrorCode::Validation, "port " + cp->to_string() + " already carries a link",
                        cp->to_string());
        for (const auto& h : hosts_)
            if (h.cp == *cp)
                throw Error(ErrorCode::Validation, "port " + cp->to_string() + " is a host port",
                            cp->to_string());
    }
    if (a == b)
        throw Error(ErrorCode::Validation, "link endpoints must differ: " + a.to_string(), a.to_string());
    std::size_t index = links_.size();
    links_.push_back(Link{a, b, LinkState::Up});
    link_ports_[a] = index;
    link_ports_[b] = index;
}

void Topology::add_host(Host host)
{
    if (!devices_.contains(host.cp.device))
        throw Error(ErrorCode::Validation, "host " + host.name + " attached to unknown device " +
                    host.cp.device.str(), host.cp.device.str());
    if (!has_port(host.cp))
        throw Error(ErrorCode::Validation, "host port " + host.cp.to_string() + " is not a valid port",
                    host.cp.to_string());
    if (link_ports_.contains(host.cp))
        throw Error(ErrorCode::Validation, "host port " + host.cp.to_string() + " is a link port",
                    host.cp.to_string());
    for (const auto& h : hosts_)
        if (h.cp == host.cp)
            throw Error(ErrorCode::Validation, "port " + host.cp.to_string() + " already has a host",
                        host.cp.to_string());
    hosts_.push_back(std::move(host));
}

void Topology::require_device(const DeviceId& id) const
{
    if (!devices_.contains(id))
        throw Error(ErrorCode::NotFound, "unknown device " + id.str(), id.str());
}

const Device& Topology::device(const DeviceId& id) const
{
    require_device(id);
    return devices_.at(id);
}

bool Topology::device_up(const DeviceId& id) const
{
    auto it = devices_.find(id);
    return it != devices_.end() && it->second.state == DeviceState::Up;
}

bool Topology::has_port(const ConnectPoint& cp) const
{
    auto it = devices_.find(cp.device);
    return it != devices_.end() && cp.port >= 1 && cp.port <= it->second.ports;
}

std::optional<std::size_t> Topology::link_at(const ConnectPoint& cp) const
{
    auto it = link_ports_.find(cp);
    if (it == link_ports_.end())
        return std::nullopt;
    return it->second;
}

std::vector<ConnectPoint> Topology::edge_ports() const
{
    std::vector<ConnectPoint> out;
    for (const auto& [id, dev] : devices_)
        for (PortNumber p = 1; p <= dev.ports; ++p) {
            ConnectPoint cp{id, p};
            if (!link_ports_.contains(cp))
                out.push_back(cp);
        }
    return out;
}

bool Topology::link_usable(const Link& link) const
{
    return link.state == LinkState::Up && device_up(link.a.device) && device_up(link.b.device);
}

std::size_t Topology::find_link(const LinkRef& ref) const
{
    auto endpoint_matches = [](const std::string& text, const ConnectPoint& cp) {
        if (text.find('/') != std::string::npos)
            return ConnectPoint::parse(text) == cp;
        return cp.device.str() == text;
    };
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const auto& l = links_[i];
        if ((endpoint_matches(ref.a, l.a) && endpoint_matches(ref.b, l.b)) ||
            (endpoint_matches(ref.a, l.b) && endpoint_matches(ref.b, l.a)))
            hits.push_back(i);
    }
    std::string name = ref.a + "-" + ref.b;
    if (hits.empty())
        throw Error(ErrorCode::NotFound, "unknown link " + name, name);
    if (hits.size() > 1)
        throw Error(ErrorCode::Validation, "link reference " + name + " is ambiguous; use DEVICE/PORT", name);
    return hits.front();
}

std::vector<TopologyEvent> Topology::set_link_state(std::size_t link_index, LinkState state)
{
    if (link_index >= links_.size())
        throw Error(ErrorCode::NotFound, "unknown link #" + std::to_string(link_index));
    auto& link = links_[link_index];
    if (link.state == state)
        return {};
    link.state = state;
    TopologyEvent ev{state == LinkState::Up ? TopologyEvent::Kind::LinkUp : TopologyEvent::Kind::LinkDown,
                     link, std::nullopt, next_seq_++};
    return {ev};
}

std::vector<TopologyEvent> Topology::set_device_state(const DeviceId& id, DeviceState state)
{
    require_device(id);
    auto& dev = devices_.at(id);
    if (dev.state == state)
        return {};
    dev.state = state;
    TopologyEvent ev{state == DeviceState::Up ? TopologyEvent::Kind::DeviceUp
                                              : TopologyEvent::Kind::DeviceDown,
                     std::nullopt, id, next_seq_++};
    return {ev};
}

std::optional<Path> Topology::shortest_path(const DeviceId& src, const DeviceId& dst) const
{
    require_device(src);
    require_device(dst);
    if (!device_up(src) || !device_up(dst))
        return std::nullopt;
    if (src == dst)
        return Path{};

    // Usable adjacency as (from cp, to cp) pairs per device.
    std::map<DeviceId, std::vector<Hop>> adj;
    for (const auto& l : links_) {
        if (!link_usable(l))
            continue;
        adj[l.a.device].push_back({l.a, l.b});
        adj[l.b.device].push_back({l.b, l.a});
    }

    // Hop distance to dst.
    std::map<DeviceId, int> dist{{dst, 0}};
    std::deque<DeviceId> queue{dst};
    while (!queue.empty()) {
        DeviceId u = queue.front();
        queue.pop_front();
        for (const auto& hop : adj[u]) {
            if (!dist.contains(hop.to.device)) {
                dist[hop.to.device] = dist[u] + 1;
                queue.push_back(hop.to.device);
            }
        }
    }
    if (!dist.contains(src))
        return std::nullopt;

    // Greedy descent picking the smallest next device yields the
    // lexicographically smallest shortest path.
    Path path;
    DeviceId cur = src;
    while (cur != dst) {
        const Hop* best = nullptr;
        for (const auto& hop : adj[cur]) {
            auto it = dist.find(hop.to.device);
            if (it == dist.end() || it->second != dist[cur] - 1)
                continue;
            if (!best || std::tie(hop.to.device, hop.from.port, hop.to.port) <
                             std::tie(best->to.device, best->from.port, best->to.port))
                best = &hop;
        }
        path.push_back(*best);
        cur = best->to.device;
    }
    return path;
}

std::vector<DeviceId> path_devices(const DeviceId& src, const Path& path)
{
    std::vector<DeviceId> out{src};
    for (const auto& hop : path)
        out.push_back(hop.to.device);
    return out;
}

} // namespace oxp
