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
#include <variant>
#include <vector>

#include "oxp/net_types.hpp"
#include "oxp/topology.hpp"

namespace oxp {

enum class EthType { Ipv4, Other };
enum class L4Kind { BgpCtrl, Icmp, Data };

std::string_view to_string(EthType t);
std::string_view to_string(L4Kind k);

struct PacketHeader {
    MacAddress eth_src;
    MacAddress eth_dst;
    std::optional<VlanId> vlan;
    EthType eth_type = EthType::Other;
    std::optional<Ipv4Address> ip_src;
    std::optional<Ipv4Address> ip_dst;
    std::optional<L4Kind> l4_kind;

    /// Throws Error(Validation) if ip fields disagree with eth_type or the VLAN is out of range.
    void validate() const;

    bool operator==(const PacketHeader&) const = default;
};

/// Unset fields are wildcards; prefixes match by containment.
struct Match {
    std::optional<PortNumber> in_port;
    std::optional<VlanId> vlan;
    std::optional<EthType> eth_type;
    std::optional<MacAddress> eth_dst;
    std::optional<Ipv4Prefix> ip_src_prefix;
    std::optional<Ipv4Prefix> ip_dst_prefix;

    bool matches(PortNumber port, const PacketHeader& header) const;

    auto operator<=>(const Match&) const = default;
};

struct SetVlan {
    VlanId vlan;
    auto operator<=>(const SetVlan&) const = default;
};
struct PopVlan {
    auto operator<=>(const PopVlan&) const = default;
};
struct Output {
    PortNumber port;
    auto operator<=>(const Output&) const = default;
};

/// SET_VLAN pushes a tag on an untagged packet and rewrites an existing one.
using Action = std::variant<SetVlan, PopVlan, Output>;

enum class App { Sdnip, L2sdx, System };
std::string_view to_string(App app);

using RuleId = std::uint64_t;
using IntentId = std::uint64_t;

struct FlowRule {
    RuleId id = 0;
    DeviceId device;
    std::uint16_t priority = 0;
    Match match;
    std::vector<Action> actions;
    App owner = App::System;
    std::optional<IntentId> intent;

    bool operator==(const FlowRule&) const = default;
};

/// Identity of a rule ignoring its allocation id and ownership.
struct FlowKey {
    DeviceId device;
    std::uint16_t priority;
    Match match;
    std::vector<Action> actions;

    static FlowKey of(const FlowRule& r) { return {r.device, r.priority, r.match, r.actions}; }
    auto operator<=>(const FlowKey&) const = default;
};

/// Per-device priority-ordered flow tables.
class FlowTables {
public:
    /// Validates the rule against the topology, assigns a fresh id and stores it.
    /// A rule with the same (device, priority, match) but different actions is
    /// a conflict; an identical rule is stored alongside the existing one.
    RuleId install(FlowRule rule, const Topology& topo);

    bool remove(RuleId id);
    std::size_t remove_by_owner(App owner, std::optional<IntentId> intent = std::nullopt);

    /// Highest priority matching rule, lowest id on ties. Null if none.
    const FlowRule* lookup(const DeviceId& device, PortNumber in_port, const PacketHeader& header) const;

    const FlowRule* find(RuleId id) const;
    std::vector<FlowRule> dump(const DeviceId& device) const;
    std::vector<FlowRule> all() const;
    std::size_t size() const;

    bool operator==(const FlowTables&) const = default;

private:
    std::map<DeviceId, std::vector<FlowRule>> tables_;
    RuleId next_id_ = 1;
};

/// Throws Error(Validation) on malformed action lists (OUTPUT must be last and unique).
void validate_actions(const std::vector<Action>& actions);

/// Data plane = topology + installed flows.
struct Network {
    Topology topology;
    FlowTables flows;

    bool operator==(const Network&) const = default;
};

/// match_packet with device existence checking.
const FlowRule* match_packet(const Network& net, const DeviceId& device, PortNumber in_port,
                             const PacketHeader& header);

struct TraversalResult {
    enum class Disposition { Delivered, Dropped, Loop };

    Disposition disposition = Disposition::Dropped;
    std::optional<ConnectPoint> egress;  // Delivered
    PacketHeader final_header;
    std::optional<DeviceId> drop_device; // Dropped
    std::string reason;
    std::vector<ConnectPoint> hops;

    bool delivered() const { return disposition == Disposition::Delivered; }
    bool delivered_at(const ConnectPoint& cp) const { return delivered() && egress == cp; }

    bool operator==(const TraversalResult&) const = default;
};

std::string_view to_string(TraversalResult::Disposition d);

constexpr int kMaxDeviceVisits = 32;

/// Walks a packet through the flow tables starting at `ingress`. OUTPUT to
/// a link port crosses the link if it is usable; OUTPUT to an edge port
/// delivers. Hops record every in-port and out-port visited.
TraversalResult traverse(const Network& net, const PacketHeader& header, const ConnectPoint& ingress);

} // namespace oxp
