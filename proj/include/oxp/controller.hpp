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
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "oxp/cluster.hpp"
#include "oxp/dataplane.hpp"
#include "oxp/intent.hpp"
#include "oxp/l2sdx.hpp"
#include "oxp/sdnip.hpp"
#include "oxp/topology.hpp"

namespace oxp {

struct TopologyChange {
    std::vector<TopologyEvent> events;
    std::vector<IntentId> recompiled;
};

/// Entry on the controller event stream (topology and mastership changes).
struct ControllerEvent {
    std::uint64_t seq = 0;
    std::string kind;
    std::string subject;
    std::string detail;

    bool operator==(const ControllerEvent&) const = default;
};

/// All controller state and the only place where it is mutated. Callers
/// serialize access; a copy is a consistent snapshot.
class Controller {
public:
    Controller() = default;
    explicit Controller(Topology topo) { load_topology(std::move(topo)); }

    /// Replaces the topology and resets every application.
    void load_topology(Topology topo);

    const Network& network() const { return net_; }
    const Topology& topology() const { return net_.topology; }
    const FlowTables& flows() const { return net_.flows; }
    const IntentService& intents() const { return intents_; }
    const SdnIp& sdnip() const { return sdnip_; }
    const L2Sdx& l2sdx() const { return l2sdx_; }
    const Cluster& cluster() const { return cluster_; }
    const std::deque<ControllerEvent>& events() const { return events_; }

    // topology
    TopologyChange set_link_state(const LinkRef& link, LinkState state);
    TopologyChange set_device_state(const DeviceId& device, DeviceState state);

    // dataplane
    RuleId install_flow(FlowRule rule);
    std::size_t remove_flows_by_owner(App owner, std::optional<IntentId> intent = std::nullopt);
    const FlowRule* match(const DeviceId& device, PortNumber in_port, const PacketHeader& header) const;
    TraversalResult traverse(const PacketHeader& header, const ConnectPoint& ingress) const;

    // intents
    IntentId submit_intent(Intent intent);
    void withdraw_intent(IntentId id);

    // sdnip
    std::vector<IntentId> sdnip_activate(const std::vector<Peer>& peers, const Peer& speaker);
    std::vector<IntentId> add_peer(const Peer& peer);
    void remove_peer(const std::string& name);
    std::vector<SessionStatus> refresh_sessions();
    RibDelta announce(const std::string& peer, const Route& route);
    RibDelta withdraw_route(const std::string& peer, const Ipv4Prefix& prefix);

    // l2sdx
    const Vxp& create_vxp(const std::string& name);
    const EdgeConnector& add_connector(const std::string& vxp, const std::string& name, const ConnectPoint& cp,
                                       long vlan);
    void remove_connector(const std::string& name);
    const Circuit& request_circuit(const std::string& a, const std::string& b);
    void remove_circuit(CircuitId id);
    OperationalStatus status(const std::string& subject) const;

    // cluster
    void init_cluster(const std::vector<std::string>& instances);
    MastershipChange fail_instance(const std::string& id);
    MastershipChange recover_instance(const std::string& id);
    const std::string& master_of(const DeviceId& device) const { return cluster_.master_of(device); }

    /// Everything failover must not touch: intents, RIB, circuits and flows.
    bool same_service_state(const Controller& other) const;

private:
    /// Mutations are frozen while every cluster instance is dead.
    void ensure_writable() const;
    void apply_topology_events(TopologyChange& change);
    void record(std::string kind, std::string subject, std::string detail = {});

    Network net_;
    IntentService intents_;
    SdnIp sdnip_;
    L2Sdx l2sdx_;
    Cluster cluster_;
    std::deque<ControllerEvent> events_;
    std::uint64_t next_event_ = 1;
};

/// Every installed rule keyed by (device, priority, match, actions).
std::multiset<FlowKey> flow_keys(const Controller& c);

/// Rules of \p after that serve something already present in \p before:
/// rules without an intent, rules of intents that existed before, and for
/// multipoint intents only the branches of ingresses that existed before.
std::multiset<FlowKey> preexisting_flow_keys(const Controller& before, const Controller& after);

} // namespace oxp
