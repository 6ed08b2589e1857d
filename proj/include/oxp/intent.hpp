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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "oxp/dataplane.hpp"
#include "oxp/topology.hpp"

namespace oxp {

/// Traffic class of an intent: a Match without in_port.
struct Selector {
    std::optional<VlanId> vlan;
    std::optional<EthType> eth_type;
    std::optional<MacAddress> eth_dst;
    std::optional<Ipv4Prefix> ip_src_prefix;
    std::optional<Ipv4Prefix> ip_dst_prefix;

    Match at_port(std::optional<PortNumber> in_port) const
    {
        return Match{in_port, vlan, eth_type, eth_dst, ip_src_prefix, ip_dst_prefix};
    }

    auto operator<=>(const Selector&) const = default;
};

/// Egress header rewrite. At most one VLAN operation.
struct Treatment {
    std::optional<VlanId> set_vlan;
    bool pop_vlan = false;

    bool empty() const { return !set_vlan && !pop_vlan; }
    auto operator<=>(const Treatment&) const = default;
};

enum class IntentState { Submitted, Installed, Failed, Withdrawn };
std::string_view to_string(IntentState s);

struct PointToPoint {
    ConnectPoint ingress;
    ConnectPoint egress;
    bool operator==(const PointToPoint&) const = default;
};

struct MultiPointToSinglePoint {
    std::set<ConnectPoint> ingresses;
    ConnectPoint egress;
    bool operator==(const MultiPointToSinglePoint&) const = default;
};

using IntentEndpoints = std::variant<PointToPoint, MultiPointToSinglePoint>;

struct Intent {
    IntentId id = 0;
    IntentEndpoints endpoints;
    Selector selector;
    Treatment treatment;
    App owner = App::System;
    IntentState state = IntentState::Submitted;

    std::optional<VlanId> core_vlan;
    std::vector<RuleId> rules;
    std::set<ConnectPoint> unreachable; // MP2SP ingresses without a path
    std::string detail;

    bool is_p2p() const { return std::holds_alternative<PointToPoint>(endpoints); }
    const ConnectPoint& egress() const;
    std::vector<ConnectPoint> ingresses() const;

    bool operator==(const Intent&) const = default;
};

constexpr std::uint16_t kP2pPriority = 40000;
constexpr std::uint16_t kTransitBasePriority = 1000;
constexpr VlanId kCoreVlanFirst = 3000;
constexpr VlanId kCoreVlanLast = 3999;

/// Per-intent VLAN ids used to carry point-to-point traffic across the core.
class CoreVlanPool {
public:
    CoreVlanPool(VlanId first = kCoreVlanFirst, VlanId last = kCoreVlanLast) : first_(first), last_(last) {}

    /// Returns the existing allocation if present; nullopt when exhausted.
    std::optional<VlanId> allocate(IntentId intent);
    void release(IntentId intent);
    std::optional<VlanId> lookup(IntentId intent) const;
    const std::map<IntentId, VlanId>& allocations() const { return by_intent_; }

    bool operator==(const CoreVlanPool&) const = default;

private:
    VlanId first_;
    VlanId last_;
    std::map<IntentId, VlanId> by_intent_;
    std::set<VlanId> used_;
};

/// Throws Error(Validation) if endpoints, selector or treatment are malformed
/// or any connect point is not an edge port of `topo`.
void validate_intent(const Intent& intent, const Topology& topo);

/// Rules realizing a point-to-point intent along shortest_path(ingress, egress).
/// `core_vlan` is required when the path spans more than one device.
/// Throws Error(NoPath) when the endpoints are disconnected.
std::vector<FlowRule> compile_p2p(const Intent& intent, const Topology& topo, std::optional<VlanId> core_vlan);

struct Mp2spCompilation {
    std::vector<FlowRule> rules;
    std::set<ConnectPoint> unreachable;
};

/// Hop-by-hop rules from every ingress toward the egress, priority
/// kTransitBasePriority + destination prefix length. Shared segments are
/// emitted once. Throws Error(NoPath) only if no ingress can reach the egress.
Mp2spCompilation compile_mp2sp(const Intent& intent, const Topology& topo);

/// Intent store and installer. All mutations go through a Network.
class IntentService {
public:
    /// Validates, stores and installs the intent. A compilation failure
    /// leaves the intent FAILED with no rules rather than throwing.
    IntentId submit(Intent intent, Network& net);

    /// Removes all rules, releases the core VLAN, marks WITHDRAWN.
    void withdraw(IntentId id, Network& net);

    /// Replaces the ingress set of an MP2SP intent. Rules still needed by the
    /// remaining ingresses are left in place.
    void update_ingresses(IntentId id, std::set<ConnectPoint> ingresses, Network& net);

    /// Recompiles intents touched by a failure, or retries failed intents on
    /// recovery. Returns ids whose installed rules changed.
    std::vector<IntentId> handle_topology_event(const TopologyEvent& event, Network& net);

    const Intent& get(IntentId id) const;
    const Intent* find(IntentId id) const;
    const std::map<IntentId, Intent>& intents() const { return intents_; }
    const CoreVlanPool& core_vlans() const { return pool_; }

    bool operator==(const IntentService&) const = default;

private:
    Intent& mutable_intent(IntentId id);
    /// Compiles against the current topology and reconciles installed rules.
    /// Returns true if the rule set changed.
    bool realize(Intent& intent, Network& net);
    void fail(Intent& intent, Network& net, std::string detail);
    bool references(const Intent& intent, const TopologyEvent& event, const Network& net) const;

    std::map<IntentId, Intent> intents_;
    CoreVlanPool pool_;
    IntentId next_id_ = 1;
};

} // namespace oxp
