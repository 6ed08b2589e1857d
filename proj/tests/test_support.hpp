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

// Independent reference implementations used as test oracles. They share no
// code with the controller beyond the plain data types.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "oxp/controller.hpp"
#include "oxp/dataplane.hpp"
#include "oxp/topology.hpp"

namespace oxp::testing {

inline ConnectPoint cp(const std::string& s) { return ConnectPoint::parse(s); }
inline DeviceId dev(const std::string& s) { return DeviceId(s); }

/// Device names "S1".."Sn"; zero-padded so name order equals index order.
inline std::string switch_name(int i)
{
    return std::string("S") + (i < 10 ? "0" : "") + std::to_string(i);
}

/// Builds a topology from an undirected edge list over n devices. Link ports
/// are allocated from 1 upwards; the remaining ports are edge ports.
inline Topology graph_topology(int n, const std::vector<std::pair<int, int>>& edges, int ports = 16)
{
    Topology t;
    for (int i = 0; i < n; ++i)
        t.add_device(DeviceId(switch_name(i)), static_cast<PortNumber>(ports));
    std::vector<PortNumber> next(n, 1);
    for (auto [a, b] : edges)
        t.add_link({DeviceId(switch_name(a)), next[a]++}, {DeviceId(switch_name(b)), next[b]++});
    return t;
}

/// Free (non-link) ports of a device, ascending.
inline std::vector<ConnectPoint> free_ports(const Topology& t, const DeviceId& d)
{
    std::vector<ConnectPoint> out;
    for (PortNumber p = 1; p <= t.device(d).ports; ++p)
        if (!t.is_link_port({d, p}))
            out.push_back({d, p});
    return out;
}

inline bool connected(int n, const std::vector<std::pair<int, int>>& edges)
{
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int components = n;
    for (auto [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components <= 1;
}

/// Random connected simple graph: a random spanning tree plus extra edges.
inline std::vector<std::pair<int, int>> random_connected_edges(std::mt19937_64& rng, int n, int extra)
{
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 1; i < n; ++i) {
        int a = order[i];
        int b = order[std::uniform_int_distribution<int>(0, i - 1)(rng)];
        edges.emplace_back(std::min(a, b), std::max(a, b));
        seen.insert(edges.back());
    }
    int max_edges = n * (n - 1) / 2;
    for (int k = 0; k < extra && static_cast<int>(seen.size()) < max_edges; ++k) {
        int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
        if (a == b || seen.count({std::min(a, b), std::max(a, b)}))
            continue;
        edges.emplace_back(std::min(a, b), std::max(a, b));
        seen.insert(edges.back());
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    return edges;
}

/// Reachability over usable links by union-find.
inline bool reachable(const Topology& t, const DeviceId& a, const DeviceId& b)
{
    if (!t.device_up(a) || !t.device_up(b))
        return false;
    std::map<DeviceId, DeviceId> parent;
    for (const auto& [id, _] : t.devices())
        parent[id] = id;
    std::function<DeviceId(const DeviceId&)> find = [&](const DeviceId& x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& l : t.links())
        if (l.state == LinkState::Up && t.device_up(l.a.device) && t.device_up(l.b.device))
            parent[find(l.a.device)] = find(l.b.device);
    return find(a) == find(b);
}

/// Brute-force shortest path: enumerate every simple path over usable links
/// and take the minimum by (hop count, device-name sequence, port sequence).
inline std::optional<Path> brute_force_path(const Topology& t, const DeviceId& src, const DeviceId& dst)
{
    if (!t.device_up(src) || !t.device_up(dst))
        return std::nullopt;
    if (src == dst)
        return Path{};
    using Key = std::tuple<std::size_t, std::vector<std::string>, std::vector<std::pair<PortNumber, PortNumber>>>;
    std::optional<std::pair<Key, Path>> best;
    std::set<DeviceId> visited{src};
    Path current;
    std::function<void(const DeviceId&)> dfs = [&](const DeviceId& at) {
        if (at == dst) {
            std::vector<std::string> names{src.str()};
            std::vector<std::pair<PortNumber, PortNumber>> ports;
            for (const auto& h : current) {
                names.push_back(h.to.device.str());
                ports.emplace_back(h.from.port, h.to.port);
            }
            Key key{current.size(), names, ports};
            if (!best || key < best->first)
                best = std::make_pair(key, current);
            return;
        }
        for (const auto& l : t.links()) {
            if (l.state != LinkState::Up)
                continue;
            for (int dir = 0; dir < 2; ++dir) {
                const ConnectPoint& from = dir == 0 ? l.a : l.b;
                const ConnectPoint& to = dir == 0 ? l.b : l.a;
                if (from.device != at || visited.count(to.device) || !t.device_up(to.device))
                    continue;
                visited.insert(to.device);
                current.push_back({from, to});
                dfs(to.device);
                current.pop_back();
                visited.erase(to.device);
            }
        }
    };
    dfs(src);
    if (!best)
        return std::nullopt;
    return best->second;
}

/// Single-rule predicate written independently of Match::matches.
inline bool rule_applies(const FlowRule& r, PortNumber in_port, const PacketHeader& h)
{
    const Match& m = r.match;
    if (m.in_port && *m.in_port != in_port)
        return false;
    if (m.vlan && (!h.vlan || *h.vlan != *m.vlan))
        return false;
    if (m.eth_type && *m.eth_type != h.eth_type)
        return false;
    if (m.eth_dst && m.eth_dst->value != h.eth_dst.value)
        return false;
    auto in_prefix = [](const Ipv4Prefix& p, const std::optional<Ipv4Address>& a) {
        if (!a)
            return false;
        if (p.length() == 0)
            return true;
        std::uint32_t mask = 0xffffffffu << (32 - p.length());
        return (a->value & mask) == (p.network().value & mask);
    };
    if (m.ip_src_prefix && !in_prefix(*m.ip_src_prefix, h.ip_src))
        return false;
    if (m.ip_dst_prefix && !in_prefix(*m.ip_dst_prefix, h.ip_dst))
        return false;
    return true;
}

/// Reference lookup: max by (priority, -id) over every applicable rule.
inline std::optional<RuleId> reference_lookup(const std::vector<FlowRule>& rules, const DeviceId& d,
                                              PortNumber in_port, const PacketHeader& h)
{
    const FlowRule* best = nullptr;
    for (const auto& r : rules) {
        if (r.device != d || !rule_applies(r, in_port, h))
            continue;
        if (!best || r.priority > best->priority || (r.priority == best->priority && r.id < best->id))
            best = &r;
    }
    return best ? std::optional<RuleId>(best->id) : std::nullopt;
}

inline PacketHeader l2_frame(std::optional<VlanId> vlan)
{
    PacketHeader h;
    h.vlan = vlan;
    h.eth_type = EthType::Other;
    h.l4_kind = L4Kind::Data;
    return h;
}

inline PacketHeader ip_packet(std::optional<VlanId> vlan, const std::string& src, const std::string& dst)
{
    PacketHeader h;
    h.vlan = vlan;
    h.eth_type = EthType::Ipv4;
    h.ip_src = Ipv4Address::parse(src);
    h.ip_dst = Ipv4Address::parse(dst);
    h.l4_kind = L4Kind::Data;
    return h;
}

/// Line S00-S01-...; every device has ports 1 and 2 for links and 3.. free.
inline Topology line_topology(int n, int ports = 8)
{
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i)
        edges.emplace_back(i, i + 1);
    Topology t;
    for (int i = 0; i < n; ++i)
        t.add_device(DeviceId(switch_name(i)), static_cast<PortNumber>(ports));
    for (auto [a, b] : edges)
        t.add_link({DeviceId(switch_name(a)), 2}, {DeviceId(switch_name(b)), 1});
    return t;
}

/// Diamond A-B-D, A-C-D with edge ports 5..8 on every device.
inline Topology diamond()
{
    Topology t;
    for (const char* d : {"A", "B", "C", "D"})
        t.add_device(DeviceId(d), 8);
    t.add_link(cp("A/1"), cp("B/1"));
    t.add_link(cp("A/2"), cp("C/1"));
    t.add_link(cp("B/2"), cp("D/1"));
    t.add_link(cp("C/2"), cp("D/2"));
    return t;
}

/// Packets entering (cp, vlan) for every edge port and every VLAN any
/// connector uses. A bound pair may only reach the far end of its own live
/// circuit with that end's VLAN; anything else delivered is a leak.
inline std::vector<std::string> traffic_leaks(const Controller& c)
{
    std::set<VlanId> vlans;
    for (const auto& [_, con] : c.l2sdx().connectors())
        vlans.insert(con.vlan);
    std::vector<std::string> leaks;
    for (const auto& port : c.topology().edge_ports()) {
        for (VlanId v : vlans) {
            std::optional<std::pair<ConnectPoint, VlanId>> allowed;
            for (const auto& [_, circuit] : c.l2sdx().circuits()) {
                if (circuit.admin_state == CircuitState::Removed)
                    continue;
                const auto& a = c.l2sdx().connectors().at(circuit.a);
                const auto& b = c.l2sdx().connectors().at(circuit.b);
                if (a.cp == port && a.vlan == v)
                    allowed = {b.cp, b.vlan};
                if (b.cp == port && b.vlan == v)
                    allowed = {a.cp, a.vlan};
            }
            auto r = c.traverse(l2_frame(v), port);
            if (!r.delivered())
                continue;
            if (!allowed || *r.egress != allowed->first || r.final_header.vlan != allowed->second)
                leaks.push_back(port.to_string() + " vlan " + std::to_string(v) + " -> " + r.egress->to_string());
        }
    }
    return leaks;
}

/// Random connected topology of 2..max_devices switches with one VXP per
/// `vxps`, connectors on random edge ports and up to `circuits` circuits.
inline Controller random_l2_config(std::mt19937_64& rng, int max_devices = 8, int circuits = 6, int vxps = 2)
{
    int n = std::uniform_int_distribution<int>(2, max_devices)(rng);
    auto edges = random_connected_edges(rng, n, std::uniform_int_distribution<int>(0, n)(rng));
    Controller c(graph_topology(n, edges, 12));
    for (int v = 0; v < vxps; ++v)
        c.create_vxp("vxp" + std::to_string(v));
    auto ports = c.topology().edge_ports();
    std::uniform_int_distribution<std::size_t> any_port(0, ports.size() - 1);
    std::uniform_int_distribution<int> any_vlan(100, 107);
    std::uniform_int_distribution<int> any_vxp(0, vxps - 1);
    std::vector<std::string> free;
    for (int k = 0; k < 3 * circuits; ++k) {
        auto p = ports[any_port(rng)];
        auto vlan = any_vlan(rng);
        if (c.l2sdx().connector_at(p, static_cast<VlanId>(vlan)))
            continue;
        std::string name = "c" + std::to_string(k);
        c.add_connector("vxp" + std::to_string(any_vxp(rng)), name, p, vlan);
        free.push_back(name);
    }
    int made = 0;
    for (int attempt = 0; attempt < 50 && made < circuits && free.size() >= 2; ++attempt) {
        std::shuffle(free.begin(), free.end(), rng);
        const auto& a = c.l2sdx().connector(free[0]);
        const auto& b = c.l2sdx().connector(free[1]);
        if (a.vxp != b.vxp || a.cp == b.cp)
            continue;
        c.request_circuit(free[0], free[1]);
        free.erase(free.begin(), free.begin() + 2);
        ++made;
    }
    return c;
}

/// gts7 with SDN-IP sessions, two routes and one PRG-BRA circuit, mirroring
/// the demo state.
inline Controller loaded_gts7(Topology topo)
{
    Controller c(std::move(topo));
    auto peer = [](std::string name, std::string at, std::string ip) {
        Peer p;
        p.name = std::move(name);
        p.cp = ConnectPoint::parse(at);
        p.ip = Ipv4Address::parse(ip);
        return p;
    };
    Peer speaker = peer("speaker-ams", "AMS/5", "10.0.0.1");
    speaker.kind = PeerKind::InternalSpeaker;
    c.sdnip_activate({peer("peer-lon", "LON/4", "10.0.0.11"), peer("peer-bra", "BRA/4", "10.0.0.12"),
                      peer("peer-mil", "MIL/4", "10.0.0.13")},
                     speaker);
    c.announce("peer-lon", {Ipv4Prefix::parse("10.1.0.0/16"), "peer-lon", 2});
    c.announce("peer-bra", {Ipv4Prefix::parse("10.3.0.0/16"), "peer-bra", 1});
    c.create_vxp("geant-open");
    c.add_connector("geant-open", "prg-c1", ConnectPoint::parse("PRG/4"), 100);
    c.add_connector("geant-open", "bra-c1", ConnectPoint::parse("BRA/4"), 300);
    c.request_circuit("prg-c1", "bra-c1");
    return c;
}

/// Traversal of every (edge port, vlan) probe the state cares about; used
/// to compare data-plane behavior byte for byte.
inline std::vector<TraversalResult> probe_all(const Controller& c)
{
    std::vector<TraversalResult> out;
    for (const auto& port : c.topology().edge_ports())
        for (VlanId v : {VlanId{10}, VlanId{100}, VlanId{300}}) {
            out.push_back(c.traverse(l2_frame(v), port));
            out.push_back(c.traverse(ip_packet(v, "192.0.2.1", "10.3.0.9"), port));
        }
    return out;
}

} // namespace oxp::testing
