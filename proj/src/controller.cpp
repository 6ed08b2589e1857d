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

#include "oxp/controller.hpp"

#include "oxp/error.hpp"

namespace oxp {

namespace {
constexpr std::size_t kEventLogLimit = 1024;
}

void Controller::load_topology(Topology topo)
{
    net_ = Network{std::move(topo), {}};
    intents_ = {};
    sdnip_ = {};
    l2sdx_ = {};
    cluster_ = {};
    record("TOPOLOGY_LOADED", "", std::to_string(net_.topology.devices().size()) + " devices");
}

void Controller::ensure_writable() const
{
    if (cluster_.initialized() && !cluster_.any_alive())
        throw Error(ErrorCode::Unavailable, "all controller instances are DEAD; mutations are frozen", "cluster");
}

void Controller::record(std::string kind, std::string subject, std::string detail)
{
    events_.push_back({next_event_++, std::move(kind), std::move(subject), std::move(detail)});
    if (events_.size() > kEventLogLimit)
        events_.pop_front();
}

void Controller::apply_topology_events(TopologyChange& change)
{
    for (const auto& ev : change.events) {
        record(std::string(to_string(ev.kind)), ev.subject());
        auto ids = intents_.handle_topology_event(ev, net_);
        change.recompiled.insert(change.recompiled.end(), ids.begin(), ids.end());
    }
    if (change.events.empty())
        return;
    l2sdx_.sync_admin_states(intents_);
    sdnip_.refresh_sessions(intents_, net_);
}

TopologyChange Controller::set_link_state(const LinkRef& link, LinkState state)
{
    ensure_writable();
    TopologyChange change{net_.topology.set_link_state(link, state), {}};
    apply_topology_events(change);
    return change;
}

TopologyChange Controller::set_device_state(const DeviceId& device, DeviceState state)
{
    ensure_writable();
    TopologyChange change{net_.topology.set_device_state(device, state), {}};
    apply_topology_events(change);
    return change;
}

RuleId Controller::install_flow(FlowRule rule)
{
    ensure_writable();
    return net_.flows.install(std::move(rule), net_.topology);
}

std::size_t Controller::remove_flows_by_owner(App owner, std::optional<IntentId> intent)
{
    ensure_writable();
    return net_.flows.remove_by_owner(owner, intent);
}

const FlowRule* Controller::match(const DeviceId& device, PortNumber in_port, const PacketHeader& header) const
{
    return match_packet(net_, device, in_port, header);
}

TraversalResult Controller::traverse(const PacketHeader& header, const ConnectPoint& ingress) const
{
    header.validate();
    return oxp::traverse(net_, header, ingress);
}

IntentId Controller::submit_intent(Intent intent)
{
    ensure_writable();
    return intents_.submit(std::move(intent), net_);
}

void Controller::withdraw_intent(IntentId id)
{
    ensure_writable();
    intents_.withdraw(id, net_);
}

namespace {

void check_no_connector(const L2Sdx& l2, const Peer& p)
{
    if (const auto* c = l2.connector_at(p.cp, p.vlan))
        throw Error(ErrorCode::Conflict,
                    "BGP VLAN " + std::to_string(p.vlan) + " at " + p.cp.to_string() + " is used by connector " +
                        c->name,
                    c->name);
}

} // namespace

std::vector<IntentId> Controller::sdnip_activate(const std::vector<Peer>& peers, const Peer& speaker)
{
    ensure_writable();
    check_no_connector(l2sdx_, speaker);
    for (const auto& p : peers)
        check_no_connector(l2sdx_, p);
    auto ids = sdnip_.activate(peers, speaker, intents_, net_);
    sdnip_.refresh_sessions(intents_, net_);
    return ids;
}

std::vector<IntentId> Controller::add_peer(const Peer& peer)
{
    ensure_writable();
    check_no_connector(l2sdx_, peer);
    auto ids = sdnip_.add_peer(peer, intents_, net_);
    sdnip_.refresh_sessions(intents_, net_);
    return ids;
}

void Controller::remove_peer(const std::string& name)
{
    ensure_writable();
    sdnip_.remove_peer(name, intents_, net_);
}

std::vector<SessionStatus> Controller::refresh_sessions()
{
    ensure_writable();
    return sdnip_.refresh_sessions(intents_, net_);
}

RibDelta Controller::announce(const std::string& peer, const Route& route)
{
    ensure_writable();
    return sdnip_.process_announcement(peer, route, intents_, net_);
}

RibDelta Controller::withdraw_route(const std::string& peer, const Ipv4Prefix& prefix)
{
    ensure_writable();
    return sdnip_.process_withdrawal(peer, prefix, intents_, net_);
}

const Vxp& Controller::create_vxp(const std::string& name)
{
    ensure_writable();
    return l2sdx_.create_vxp(name);
}

const EdgeConnector& Controller::add_connector(const std::string& vxp, const std::string& name,
                                               const ConnectPoint& cp, long vlan)
{
    ensure_writable();
    return l2sdx_.add_connector(vxp, name, cp, vlan, sdnip_.reserved_vlan_at(cp), net_.topology);
}

void Controller::remove_connector(const std::string& name)
{
    ensure_writable();
    l2sdx_.remove_connector(name);
}

const Circuit& Controller::request_circuit(const std::string& a, const std::string& b)
{
    ensure_writable();
    return l2sdx_.request_circuit(a, b, intents_, net_);
}

void Controller::remove_circuit(CircuitId id)
{
    ensure_writable();
    l2sdx_.remove_circuit(id, intents_, net_);
}

OperationalStatus Controller::status(const std::string& subject) const
{
    return l2sdx_.status(subject, intents_, net_);
}

void Controller::init_cluster(const std::vector<std::string>& instances)
{
    std::vector<DeviceId> devices;
    for (const auto& [id, _] : net_.topology.devices())
        devices.push_back(id);
    cluster_.init(instances, std::move(devices));
    record("CLUSTER_INIT", "", std::to_string(instances.size()) + " instances");
}

MastershipChange Controller::fail_instance(const std::string& id)
{
    auto change = cluster_.fail_instance(id);
    for (const auto& r : change.reassignments)
        record("MASTERSHIP_CHANGED", r.device.str(), r.new_master.value_or("<none>"));
    if (change.all_dead)
        record("CLUSTER_UNAVAILABLE", id, "all instances DEAD");
    return change;
}

MastershipChange Controller::recover_instance(const std::string& id)
{
    auto change = cluster_.recover_instance(id);
    for (const auto& r : change.reassignments)
        record("MASTERSHIP_CHANGED", r.device.str(), r.new_master.value_or("<none>"));
    return change;
}

bool Controller::same_service_state(const Controller& other) const
{
    return net_ == other.net_ && intents_ == other.intents_ && sdnip_ == other.sdnip_ && l2sdx_ == other.l2sdx_;
}

std::multiset<FlowKey> flow_keys(const Controller& c)
{
    std::multiset<FlowKey> out;
    for (const auto& r : c.flows().all())
        out.insert(FlowKey::of(r));
    return out;
}

std::multiset<FlowKey> preexisting_flow_keys(const Controller& before, const Controller& after)
{
    std::multiset<FlowKey> out;
    for (const auto& r : after.flows().all()) {
        if (!r.intent) {
            out.insert(FlowKey::of(r));
            continue;
        }
        const Intent* old = before.intents().find(*r.intent);
        if (!old || old->state == IntentState::Withdrawn)
            continue;
        const Intent& now = after.intents().get(*r.intent);
        if (now.is_p2p()) {
            out.insert(FlowKey::of(r));
            continue;
        }
        // Restrict the multipoint intent to the ingresses it had before.
        Intent restricted = now;
        auto& ingresses = std::get<MultiPointToSinglePoint>(restricted.endpoints).ingresses;
        std::set<ConnectPoint> kept;
        for (const auto& cp : old->ingresses())
            if (ingresses.contains(cp))
                kept.insert(cp);
        ingresses = kept;
        if (kept.empty())
            continue;
        try {
            auto compiled = compile_mp2sp(restricted, after.topology());
            for (const auto& c : compiled.rules)
                if (FlowKey::of(c) == FlowKey::of(r)) {
                    out.insert(FlowKey::of(r));
                    break;
                }
        } catch (const Error&) {
        }
    }
    return out;
}

} // namespace oxp
