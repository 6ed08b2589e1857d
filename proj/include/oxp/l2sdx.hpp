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
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oxp/intent.hpp"

namespace oxp {

/// Virtual eXchange Point: a namespace of edge connectors.
struct Vxp {
    std::string name;
    std::set<std::string> connectors;

    bool operator==(const Vxp&) const = default;
};

/// A (port, client VLAN) service end-point.
struct EdgeConnector {
    std::string name;
    std::string vxp;
    ConnectPoint cp;
    VlanId vlan = 0;

    bool operator==(const EdgeConnector&) const = default;
};

using CircuitId = std::uint64_t;

enum class CircuitState { Requested, Active, Removed };
std::string_view to_string(CircuitState s);

struct Circuit {
    CircuitId id = 0;
    std::string a;
    std::string b;
    std::pair<IntentId, IntentId> intents{}; // a->b, b->a
    CircuitState admin_state = CircuitState::Requested;

    bool operator==(const Circuit&) const = default;
};

enum class OperStatus { Up, Degraded, Down };
std::string_view to_string(OperStatus s);

struct OperationalStatus {
    OperStatus status = OperStatus::Down;
    std::string detail;
};

/// Layer 2 circuit service. Enforces:
///   - connector (cp, vlan) pairs are never reused;
///   - a connector is used by at most one live circuit;
///   - circuits never cross Virtual eXchange Points.
class L2Sdx {
public:
    const Vxp& create_vxp(const std::string& name);

    /// `reserved_bgp_vlan` is the VLAN SDN-IP holds at `cp`.
    const EdgeConnector& add_connector(const std::string& vxp, const std::string& name, const ConnectPoint& cp,
                                       long vlan, VlanId reserved_bgp_vlan, const Topology& topo);
    /// Only allowed when the connector is in no live circuit.
    void remove_connector(const std::string& name);

    const Circuit& request_circuit(const std::string& a, const std::string& b, IntentService& intents,
                                   Network& net);
    void remove_circuit(CircuitId id, IntentService& intents, Network& net);

    /// Subject is a connector name or a circuit id.
    OperationalStatus status(const std::string& subject, const IntentService& intents, const Network& net) const;
    OperationalStatus connector_status(const EdgeConnector& c, const Network& net) const;
    OperationalStatus circuit_status(const Circuit& c, const IntentService& intents, const Network& net) const;

    /// Promotes REQUESTED circuits whose intents are both INSTALLED.
    void sync_admin_states(const IntentService& intents);

    /// Live circuit using the connector, if any.
    const Circuit* circuit_of(const std::string& connector) const;
    /// Connector holding (cp, vlan), if any.
    const EdgeConnector* connector_at(const ConnectPoint& cp, VlanId vlan) const;

    const std::map<std::string, Vxp>& vxps() const { return vxps_; }
    const std::map<std::string, EdgeConnector>& connectors() const { return connectors_; }
    const std::map<CircuitId, Circuit>& circuits() const { return circuits_; }
    const Circuit& circuit(CircuitId id) const;
    const EdgeConnector& connector(const std::string& name) const;

    /// Probe frame a circuit carries from `from`.
    static PacketHeader probe(const EdgeConnector& from);

    bool operator==(const L2Sdx&) const = default;

private:
    std::map<std::string, Vxp> vxps_;
    std::map<std::string, EdgeConnector> connectors_;
    std::map<CircuitId, Circuit> circuits_;
    CircuitId next_circuit_ = 1;
};

} // namespace oxp
