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

#include "oxp/l2sdx.hpp"

#include <charconv>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(CircuitState s)
{
    switch (s) {
    case CircuitState::Requested: return "REQUESTED";
    case CircuitState::Active: return "ACTIVE";
    case CircuitState::Removed: return "REMOVED";
    }
    return "UNKNOWN";
}

std::string_view to_string(OperStatus s)
{
    switch (s) {
    case OperStatus::Up: return "UP";
    case OperStatus::Degraded: return "DEGRADED";
    case OperStatus::Down: return "DOWN";
    }
    return "UNKNOWN";
}

PacketHeader L2Sdx::probe(const EdgeConnector& from)
{
    PacketHeader h;
    h.vlan = from.vlan;
    h.eth_type = EthType::Other;
    h.l4_kind = L4Kind::Data;
    return h;
}

const Vxp& L2Sdx::create_vxp(const std::string& name)
{
    if (name.empty())
        throw Error(ErrorCode::Validation, "VXP name must be non-empty");
    if (vxps_.contains(name))
        throw Error(ErrorCode::Conflict, "VXP " + name + " already exists", name);
    return vxps_[name] = Vxp{name, {}};
}

const EdgeConnector& L2Sdx::add_connector(const std::string& vxp, const std::string& name, const ConnectPoint& cp,
                                          long vlan, VlanId reserved_bgp_vlan, const Topology& topo)
{
    auto v = vxps_.find(vxp);
    if (v == vxps_.end())
        throw Error(ErrorCode::NotFound, "unknown VXP " + vxp, vxp);
    if (name.empty())
        throw Error(ErrorCode::Validation, "connector name must be non-empty");
    if (connectors_.contains(name))
        throw Error(ErrorCode::Conflict, "connector " + name + " already exists", name);
    VlanId tag = checked_vlan(vlan);
    if (!topo.is_edge_port(cp))
        throw Error(ErrorCode::Validation, cp.to_string() + " is not an edge port", cp.to_string());
    if (const auto* existing = connector_at(cp, tag))
        throw Error(ErrorCode::Conflict,
                    "port " + cp.to_string() + " VLAN " + std::to_string(tag) + " is already used by connector " +
                        existing->name,
                    existing->name);
    if (tag == reserved_bgp_vlan)
        throw Error(ErrorCode::Conflict,
                    "VLAN " + std::to_string(tag) + " at " + cp.to_string() + " is reserved by SDN-IP for BGP",
                    "sdnip");
    v->second.connectors.insert(name);
    return connectors_[name] = EdgeConnector{name, vxp, cp, tag};
}

void L2Sdx::remove_connector(const std::string& name)
{
    const auto& c = connector(name);
    if (const auto* circuit = circuit_of(name))
        throw Error(ErrorCode::Conflict,
                    "connector " + name + " is used by circuit " + std::to_string(circuit->id),
                    std::to_string(circuit->id));
    vxps_.at(c.vxp).connectors.erase(name);
    connectors_.erase(name);
}

const Circuit& L2Sdx::request_circuit(const std::string& a, const std::string& b, IntentService& intents,
                                      Network& net)
{
    const auto& ca = connector(a);
    const auto& cb = connector(b);
    if (a == b)
        throw Error(ErrorCode::Validation, "a circuit needs two distinct connectors", a);
    if (ca.vxp != cb.vxp)
        throw Error(ErrorCode::Isolation,
                    "connector " + b + " in virtual eXchange Point " + cb.vxp +
                        " cannot be interconnected with a connector in another virtual eXchange Point (" + ca.vxp +
                        ")",
                    b);
    for (const auto* c : {&ca, &cb})
        if (const auto* busy = circuit_of(c->name))
            throw Error(ErrorCode::Conflict,
                        "connector " + c->name + " is already used by circuit " + std::to_string(busy->id),
                        std::to_string(busy->id));
    if (ca.cp == cb.cp)
        throw Error(ErrorCode::Validation, "connectors " + a + " and " + b + " share port " + ca.cp.to_string(), b);

    auto one_way = [&](const EdgeConnector& from, const EdgeConnector& to) {
        Intent in;
        in.endpoints = PointToPoint{from.cp, to.cp};
        in.selector.vlan = from.vlan;
        in.treatment.set_vlan = to.vlan;
        in.owner = App::L2sdx;
        return intents.submit(std::move(in), net);
    };
    IntentId ab = one_way(ca, cb);
    IntentId ba = 0;
    try {
        ba = one_way(cb, ca);
    } catch (...) {
        intents.withdraw(ab, net);
        throw;
    }

    Circuit c;
    c.id = next_circuit_++;
    c.a = a;
    c.b = b;
    c.intents = {ab, ba};
    bool installed = intents.get(ab).state == IntentState::Installed &&
                     intents.get(ba).state == IntentState::Installed;
    c.admin_state = installed ? CircuitState::Active : CircuitState::Requested;
    return circuits_[c.id] = c;
}

void L2Sdx::remove_circuit(CircuitId id, IntentService& intents, Network& net)
{
    auto it = circuits_.find(id);
    if (it == circuits_.end() || it->second.admin_state == CircuitState::Removed)
        throw Error(ErrorCode::NotFound, "circuit " + std::to_string(id) + " unknown or already removed",
                    std::to_string(id));
    for (IntentId i : {it->second.intents.first, it->second.intents.second})
        if (const auto* in = intents.find(i); in && in->state != IntentState::Withdrawn)
            intents.withdraw(i, net);
    it->second.admin_state = CircuitState::Removed;
}

OperationalStatus L2Sdx::status(const std::string& subject, const IntentService& intents, const Network& net) const
{
    if (auto c = connectors_.find(subject); c != connectors_.end())
        return connector_status(c->second, net);
    CircuitId id = 0;
    auto [ptr, ec] = std::from_chars(subject.data(), subject.data() + subject.size(), id);
    if (ec == std::errc{} && ptr == subject.data() + subject.size())
        if (auto c = circuits_.find(id); c != circuits_.end())
            return circuit_status(c->second, intents, net);
    throw Error(ErrorCode::NotFound, "unknown connector or circuit " + subject, subject);
}

OperationalStatus L2Sdx::connector_status(const EdgeConnector& c, const Network& net) const
{
    if (!net.topology.device_up(c.cp.device))
        return {OperStatus::Down, "device " + c.cp.device.str() + " is DOWN"};
    return {OperStatus::Up, ""};
}

OperationalStatus L2Sdx::circuit_status(const Circuit& c, const IntentService& intents, const Network& net) const
{
    if (c.admin_state == CircuitState::Removed)
        return {OperStatus::Down, "circuit removed"};
    for (IntentId id : {c.intents.first, c.intents.second}) {
        const auto& in = intents.get(id);
        if (in.state != IntentState::Installed)
            return {OperStatus::Down, "intent " + std::to_string(id) + " " + std::string(to_string(in.state)) +
                                          (in.detail.empty() ? "" : ": " + in.detail)};
    }
    const auto& a = connector(c.a);
    const auto& b = connector(c.b);
    auto ab = traverse(net, probe(a), a.cp);
    auto ba = traverse(net, probe(b), b.cp);
    bool ok_ab = ab.delivered_at(b.cp) && ab.final_header.vlan == b.vlan;
    bool ok_ba = ba.delivered_at(a.cp) && ba.final_header.vlan == a.vlan;
    if (ok_ab && ok_ba)
        return {OperStatus::Up, ""};
    return {OperStatus::Degraded, std::string("intents installed but ") + (ok_ab ? c.b + "->" + c.a : c.a + "->" + c.b) +
                                      " is not delivered; recompilation pending"};
}

void L2Sdx::sync_admin_states(const IntentService& intents)
{
    for (auto& [id, c] : circuits_) {
        if (c.admin_state != CircuitState::Requested)
            continue;
        if (intents.get(c.intents.first).state == IntentState::Installed &&
            intents.get(c.intents.second).state == IntentState::Installed)
            c.admin_state = CircuitState::Active;
    }
}

const Circuit* L2Sdx::circuit_of(const std::string& connector) const
{
    for (const auto& [id, c] : circuits_)
        if (c.admin_state != CircuitState::Removed && (c.a == connector || c.b == connector))
            return &c;
    return nullptr;
}

const EdgeConnector* L2Sdx::connector_at(const ConnectPoint& cp, VlanId vlan) const
{
    for (const auto& [name, c] : connectors_)
        if (c.cp == cp && c.vlan == vlan)
            return &c;
    return nullptr;
}

const Circuit& L2Sdx::circuit(CircuitId id) const
{
    auto it = circuits_.find(id);
    if (it == circuits_.end())
        throw Error(ErrorCode::NotFound, "unknown circuit " + std::to_string(id), std::to_string(id));
    return it->second;
}

const EdgeConnector& L2Sdx::connector(const std::string& name) const
{
    auto it = connectors_.find(name);
    if (it == connectors_.end())
        throw Error(ErrorCode::NotFound, "unknown connector " + name, name);
    return it->second;
}

} // namespace oxp
