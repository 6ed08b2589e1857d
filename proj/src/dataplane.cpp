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

#include "oxp/dataplane.hpp"

#include <algorithm>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(EthType t) { return t == EthType::Ipv4 ? "IPV4" : "OTHER"; }

std::string_view to_string(L4Kind k)
{
    switch (k) {
    case L4Kind::BgpCtrl: return "BGP_CTRL";
    case L4Kind::Icmp: return "ICMP";
    case L4Kind::Data: return "DATA";
    }
    return "UNKNOWN";
}

std::string_view to_string(App app)
{
    switch (app) {
    case App::Sdnip: return "SDNIP";
    case App::L2sdx: return "L2SDX";
    case App::System: return "SYSTEM";
    }
    return "UNKNOWN";
}

std::string_view to_string(TraversalResult::Disposition d)
{
    switch (d) {
    case TraversalResult::Disposition::Delivered: return "DELIVERED";
    case TraversalResult::Disposition::Dropped: return "DROPPED";
    case TraversalResult::Disposition::Loop: return "LOOP";
    }
    return "UNKNOWN";
}

void PacketHeader::validate() const
{
    if (vlan && !is_valid_vlan(*vlan))
        throw Error(ErrorCode::Validation, "packet VLAN out of range");
    bool ipv4 = eth_type == EthType::Ipv4;
    if (ipv4 != ip_src.has_value() || ipv4 != ip_dst.has_value())
        throw Error(ErrorCode::Validation, "ip_src/ip_dst must be present iff eth_type is IPV4");
}

bool Match::matches(PortNumber port, const PacketHeader& h) const
{
    if (in_port && *in_port != port)
        return false;
    if (vlan && h.vlan != vlan)
        return false;
    if (eth_type && *eth_type != h.eth_type)
        return false;
    if (eth_dst && *eth_dst != h.eth_dst)
        return false;
    if (ip_src_prefix && (!h.ip_src || !ip_src_prefix->contains(*h.ip_src)))
        return false;
    if (ip_dst_prefix && (!h.ip_dst || !ip_dst_prefix->contains(*h.ip_dst)))
        return false;
    return true;
}

void validate_actions(const std::vector<Action>& actions)
{
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (const auto* out = std::get_if<Output>(&actions[i])) {
            if (i + 1 != actions.size())
                throw Error(ErrorCode::Validation, "OUTPUT must be the last action");
            (void)out;
        } else if (const auto* sv = std::get_if<SetVlan>(&actions[i])) {
            if (!is_valid_vlan(sv->vlan))
                throw Error(ErrorCode::Validation, "SET_VLAN id " + std::to_string(sv->vlan) + " out of range");
        }
    }
}

RuleId FlowTables::install(FlowRule rule, const Topology& topo)
{
    if (!topo.has_device(rule.device))
        throw Error(ErrorCode::NotFound, "unknown device " + rule.device.str(), rule.device.str());
    validate_actions(rule.actions);
    const auto& dev = topo.device(rule.device);
    for (const auto& a : rule.actions)
        if (const auto* out = std::get_if<Output>(&a); out && (out->port == 0 || out->port > dev.ports))
            throw Error(ErrorCode::Validation,
                        "invalid port " + std::to_string(out->port) + " on " + rule.device.str(),
                        ConnectPoint{rule.device, out->port}.to_string());
    const auto& m = rule.match;
    if (m.in_port && (*m.in_port == 0 || *m.in_port > dev.ports))
        throw Error(ErrorCode::Validation, "invalid in_port " + std::to_string(*m.in_port) + " on " +
                    rule.device.str(), rule.device.str());
    if (m.vlan && !is_valid_vlan(*m.vlan))
        throw Error(ErrorCode::Validation, "match VLAN out of range");
    if ((m.ip_src_prefix || m.ip_dst_prefix) && m.eth_type != EthType::Ipv4)
        throw Error(ErrorCode::Validation, "IP prefix match requires eth_type IPV4");

    auto& table = tables_[rule.device];
    for (const auto& existing : table) {
        if (existing.priority == rule.priority && existing.match == rule.match &&
            existing.actions != rule.actions)
            throw Error(ErrorCode::Conflict,
                        "rule conflicts with rule " + std::to_string(existing.id) + " on " + rule.device.str(),
                        std::to_string(existing.id));
    }
    rule.id = next_id_++;
    table.push_back(std::move(rule));
    return table.back().id;
}

bool FlowTables::remove(RuleId id)
{
    for (auto& [dev, table] : tables_) {
        auto it = std::find_if(table.begin(), table.end(), [&](const FlowRule& r) { return r.id == id; });
        if (it != table.end()) {
            table.erase(it);
            return true;
        }
    }
    return false;
}

std::size_t FlowTables::remove_by_owner(App owner, std::optional<IntentId> intent)
{
    std::size_t removed = 0;
    for (auto& [dev, table] : tables_) {
        removed += std::erase_if(table, [&](const FlowRule& r) {
            return r.owner == owner && (!intent || r.intent == intent);
        });
    }
    return removed;
}

const FlowRule* FlowTables::lookup(const DeviceId& device, PortNumber in_port, const PacketHeader& header) const
{
    auto it = tables_.find(device);
    if (it == tables_.end())
        return nullptr;
    const FlowRule* best = nullptr;
    for (const auto& r : it->second) {
        if (!r.match.matches(in_port, header))
            continue;
        if (!best || r.priority > best->priority || (r.priority == best->priority && r.id < best->id))
            best = &r;
    }
    return best;
}

const FlowRule* FlowTables::find(RuleId id) const
{
    for (const auto& [dev, table] : tables_)
        for (const auto& r : table)
            if (r.id == id)
                return &r;
    return nullptr;
}

std::vector<FlowRule> FlowTables::dump(const DeviceId& device) const
{
    auto it = tables_.find(device);
    if (it == tables_.end())
        return {};
    auto rules = it->second;
    std::sort(rules.begin(), rules.end(), [](const FlowRule& a, const FlowRule& b) {
        return a.priority != b.priority ? a.priority > b.priority : a.id < b.id;
    });
    return rules;
}

std::vector<FlowRule> FlowTables::all() const
{
    std::vector<FlowRule> out;
    for (const auto& [dev, table] : tables_)
        out.insert(out.end(), table.begin(), table.end());
    std::sort(out.begin(), out.end(), [](const FlowRule& a, const FlowRule& b) { return a.id < b.id; });
    return out;
}

std::size_t FlowTables::size() const
{
    std::size_t n = 0;
    for (const auto& [dev, table] : tables_)
        n += table.size();
    return n;
}

const FlowRule* match_packet(const Network& net, const DeviceId& device, PortNumber in_port,
                             const PacketHeader& header)
{
    if (!net.topology.has_device(device))
        throw Error(ErrorCode::NotFound, "unknown device " + device.str(), device.str());
    return net.flows.lookup(device, in_port, header);
}

TraversalResult traverse(const Network& net, const PacketHeader& header, const ConnectPoint& ingress)
{
    const auto& topo = net.topology;
    if (!topo.has_port(ingress))
        throw Error(ErrorCode::NotFound, "unknown ingress " + ingress.to_string(), ingress.to_string());

    TraversalResult result;
    result.final_header = header;
    auto& hdr = result.final_header;
    ConnectPoint at = ingress;
    result.hops.push_back(at);

    auto drop = [&](std::string reason) {
        result.disposition = TraversalResult::Disposition::Dropped;
        result.drop_device = at.device;
        result.reason = std::move(reason);
        return result;
    };

    for (int visits = 1;; ++visits) {
        if (visits > kMaxDeviceVisits) {
            result.disposition = TraversalResult::Disposition::Loop;
            result.reason = "exceeded " + std::to_string(kMaxDeviceVisits) + " device visits";
            return result;
        }
        if (!topo.device_up(at.device))
            return drop("device down");
        const FlowRule* rule = net.flows.lookup(at.device, at.port, hdr);
        if (!rule)
            return drop("no match");

        std::optional<PortNumber> out;
        for (const auto& action : rule->actions) {
            if (const auto* sv = std::get_if<SetVlan>(&action))
                hdr.vlan = sv->vlan;
            else if (std::holds_alternative<PopVlan>(action))
                hdr.vlan.reset();
            else
                out = std::get<Output>(action).port;
        }
        if (!out)
            return drop("no output action");

        ConnectPoint egress{at.device, *out};
        result.hops.push_back(egress);
        auto link_index = topo.link_at(egress);
        if (!link_index) {
            result.disposition = TraversalResult::Disposition::Delivered;
            result.egress = egress;
            return result;
        }
        const auto& link = topo.links()[*link_index];
        if (!topo.link_usable(link)) {
            at = egress;
            return drop("link " + link.name() + " down");
        }
        at = link.a == egress ? link.b : link.a;
        result.hops.push_back(at);
    }
}

} // namespace oxp
