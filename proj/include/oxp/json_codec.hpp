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

#include "json.hpp"
#include "oxp/controller.hpp"

namespace oxp {

using nlohmann::json;

// Outbound views. Field names are part of the REST contract.
json to_json(const Match& m);
json to_json(const Action& a);
json to_json(const FlowRule& r);
json to_json(const Selector& s);
json to_json(const Treatment& t);
json to_json(const Intent& in);
json to_json(const PacketHeader& h);
json to_json(const TraversalResult& r);
json to_json(const TopologyEvent& ev);
json to_json(const TopologyChange& c);
json to_json(const Topology& topo);
json to_json(const Peer& p);
json to_json(const Route& r);
json to_json(const SessionStatus& s);
json to_json(const RibDelta& d);
json to_json(const Vxp& v);
json to_json(const EdgeConnector& c);
json to_json(const Circuit& c);
json to_json(const OperationalStatus& s);
json to_json(const MastershipChange& c);
json to_json(const Cluster& c);
json to_json(const ControllerEvent& ev);
json to_json(const std::vector<FlowRule>& rules);

json rib_view(const SdnIp& sdnip);
json l2sdx_view(const L2Sdx& l2);

/// Counts of intents by state, RIB size and circuits by operational status.
json summary_digest(const Controller& c);

// Inbound parsing. Throw Error(Validation) on bad input.
PacketHeader header_from_json(const json& j);
Peer peer_from_json(const json& j, PeerKind kind = PeerKind::External);
Route route_from_json(const json& j);
LinkState link_state_from_string(const std::string& s);
DeviceState device_state_from_string(const std::string& s);

/// Typed field access with Validation errors naming the field.
std::string require_string(const json& j, const char* key);
long require_int(const json& j, const char* key);

} // namespace oxp
