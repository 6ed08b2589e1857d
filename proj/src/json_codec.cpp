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

#include "oxp/json_codec.hpp"

#include "oxp/error.hpp"

namespace oxp {

std::string require_string(const json& j, const char* key)
{
    auto it = j.find(key);
    if (!j.is_object() || it == j.end() || !it->is_string())
        throw Error(ErrorCode::Validation, std::string("missing string field '") + key + "'", key);
    return it->get<std::string>();
}

long require_int(const json& j, const char* key)
{
    auto it = j.find(key);
    if (!j.is_object() || it == j.end() || !it->is_number_integer())
        throw Error(ErrorCode::Validation, std::string("missing integer field '") + key + "'", key);
    return it->get<long>();
}

json to_json(const Match& m)
{
    json j = json::object();
    if (m.in_port)
        j["in_port"] = *m.in_port;
    if (m.vlan)
        j["vlan"] = *m.vlan;
    if (m.eth_type)
        j["eth_type"] = to_string(*m.eth_type);
    if (m.eth_dst)
        j["eth_dst"] = m.eth_dst->to_string();
    if (m.ip_src_prefix)
        j["ip_src_prefix"] = m.ip_src_prefix->to_string();
    if (m.ip_dst_prefix)
        j["ip_dst_prefix"] = m.ip_dst_prefix->to_string();
    return j;
}

json to_json(const Action& a)
{
    if (const auto* sv = std::get_if<SetVlan>(&a))
        return {{"type", "SET_VLAN"}, {"vlan", sv->vlan}};
    if (std::holds_alternative<PopVlan>(a))
        return {{"type", "POP_VLAN"}};
    return {{"type", "OUTPUT"}, {"port", std::get<Output>(a).port}};
}

json to_json(const FlowRule& r)
{
    json actions = json::array();
    for (const auto& a : r.actions)
        actions.push_back(to_json(a));
    return {{"id", r.id},
            {"device", r.device.str()},
            {"priority", r.priority},
            {"match", to_json(r.match)},
            {"actions", actions},
            {"owner", to_string(r.owner)},
            {"intent", r.intent ? json(*r.intent) : json(nullptr)}};
}

json to_json(const std::vector<FlowRule>& rules)
{
    json out = json::array();
    for (const auto& r : rules)
        out.push_back(to_json(r));
    return out;
}

json to_json(const Selector& s)
{
    return to_json(s.at_port(std::nullopt));
}

json to_json(const Treatment& t)
{
    json j = json::object();
    if (t.set_vlan)
        j["set_vlan"] = *t.set_vlan;
    if (t.pop_vlan)
        j["pop_vlan"] = true;
    return j;
}

json to_json(const Intent& in)
{
    json j{{"id", in.id},
           {"kind", in.is_p2p() ? "P2P" : "MP2SP"},
           {"state", to_string(in.state)},
           {"owner", to_string(in.owner)},
           {"egress", in.egress().to_string()},
           {"selector", to_json(in.selector)},
           {"treatment", to_json(in.treatment)}};
    if (const auto* p2p = std::get_if<PointToPoint>(&in.endpoints)) {
        j["ingress"] = p2p->ingress.to_string();
    } else {
        json ingresses = json::array();
        for (const auto& cp : std::get<MultiPointToSinglePoint>(in.endpoints).ingresses)
            ingresses.push_back(cp.to_string());
        j["ingresses"] = ingresses;
    }
    if (in.core_vlan)
        j["core_vlan"] = *in.core_vlan;
    if (!in.detail.empty())
        j["detail"] = in.detail;
    j["rule_count"] = in.rules.size();
    return j;
}

json to_json(const PacketHeader& h)
{
    json j{{"eth_src", h.eth_src.to_string()},
           {"eth_dst", h.eth_dst.to_string()},
           {"eth_type", to_string(h.eth_type)}};
    j["vlan"] = h.vlan ? json(*h.vlan) : json(nullptr);
    if (h.ip_src)
        j["ip_src"] = h.ip_src->to_string();
    if (h.ip_dst)
        j["ip_dst"] = h.ip_dst->to_string();
    if (h.l4_kind)
        j["l4_kind"] = to_string(*h.l4_kind);
    return j;
}

json to_json(const TraversalResult& r)
{
    json hops = json::array();
    for (const auto& cp : r.hops)
        hops.push_back(cp.to_string());
    json j{{"disposition", to_string(r.disposition)}, {"hops", hops}, {"final_header", to_json(r.final_header)}};
    if (r.egress)
        j["egress"] = r.egress->to_string();
    if (r.drop_device)
        j["device"] = r.drop_device->str();
    if (!r.reason.empty())
        j["reason"] = r.reason;
    return j;
}

json to_json(const TopologyEvent& ev)
{
    return {{"kind", to_string(ev.kind)}, {"subject", ev.subject()}, {"seq", ev.seq}};
}

json to_json(const TopologyChange& c)
{
    json events = json::array();
    for (const auto& ev : c.events)
        events.push_back(to_json(ev));
    return {{"events", events}, {"recompiled", c.recompiled}};
}

json to_json(const Topology& topo)
{
    json devices = json::array();
    for (const auto& [id, d] : topo.devices())
        devices.push_back({{"id", id.str()}, {"ports", d.ports}, {"state", to_string(d.state)}});
    json links = json::array();
    for (const auto& l : topo.links())
        links.push_back({{"a", l.a.to_string()}, {"b", l.b.to_string()}, {"state", to_string(l.state)}});
    json hosts = json::array();
    for (const auto& h : topo.hosts())
        hosts.push_back({{"cp", h.cp.to_string()}, {"name", h.name}, {"mac", h.mac}, {"ip", h.ip}});
    return {{"devices", devices}, {"links", links}, {"hosts", hosts}};
}

json to_json(const Peer& p)
{
    return {{"name", p.name}, {"cp", p.cp.to_string()}, {"vlan", p.vlan},
            {"ip", p.ip.to_string()}, {"asn", p.asn}, {"kind", to_string(p.kind)}};
}

json to_json(const Route& r)
{
    return {{"prefix", r.prefix.to_string()}, {"peer", r.origin_peer}, {"as_path_len", r.as_path_len}};
}

json to_json(const SessionStatus& s)
{
    return {{"peer", s.peer}, {"state", to_string(s.state)}};
}

json to_json(const RibDelta& d)
{
    return {{"prefix", d.prefix.to_string()},
            {"rib_changed", d.rib_changed},
            {"old_best", d.old_best ? to_json(*d.old_best) : json(nullptr)},
            {"new_best", d.new_best ? to_json(*d.new_best) : json(nullptr)},
            {"submitted", d.submitted},
            {"withdrawn", d.withdrawn},
            {"updated", d.updated}};
}

json rib_view(const SdnIp& sdnip)
{
    json entries = json::array();
    for (const auto& [prefix, candidates] : sdnip.routes()) {
        json routes = json::array();
        for (const auto& [peer, r] : candidates)
            routes.push_back(to_json(r));
        json e{{"prefix", prefix.to_string()}, {"routes", routes}};
        if (auto b = sdnip.best_routes().find(prefix); b != sdnip.best_routes().end())
            e["best"] = to_json(b->second);
        if (auto t = sdnip.transit_intents().find(prefix); t != sdnip.transit_intents().end())
            e["intent"] = t->second;
        entries.push_back(e);
    }
    return entries;
}

json to_json(const Vxp& v)
{
    return {{"name", v.name}, {"connectors", v.connectors}};
}

json to_json(const EdgeConnector& c)
{
    return {{"name", c.name}, {"vxp", c.vxp}, {"cp", c.cp.to_string()}, {"vlan", c.vlan}};
}

json to_json(const Circuit& c)
{
    return {{"id", c.id},
            {"a", c.a},
            {"b", c.b},
            {"intents", {c.intents.first, c.intents.second}},
            {"admin_state", to_string(c.admin_state)}};
}

json to_json(const OperationalStatus& s)
{
    return {{"status", to_string(s.status)}, {"detail", s.detail}};
}

json l2sdx_view(const L2Sdx& l2)
{
    json vxps = json::array();
    for (const auto& [_, v] : l2.vxps())
        vxps.push_back(to_json(v));
    json connectors = json::array();
    for (const auto& [_, c] : l2.connectors())
        connectors.push_back(to_json(c));
    json circuits = json::array();
    for (const auto& [_, c] : l2.circuits())
        circuits.push_back(to_json(c));
    return {{"vxps", vxps}, {"connectors", connectors}, {"circuits", circuits}};
}

json to_json(const MastershipChange& c)
{
    json r = json::array();
    for (const auto& x : c.reassignments)
        r.push_back({{"device", x.device.str()}, {"master", x.new_master ? json(*x.new_master) : json(nullptr)}});
    return {{"reassignments", r}, {"all_dead", c.all_dead}};
}

json to_json(const Cluster& c)
{
    json instances = json::array();
    for (const auto& [name, state] : c.instances())
        instances.push_back({{"id", name}, {"state", to_string(state)}});
    json devices = json::array();
    for (const auto& [device, prefs] : c.preferences()) {
        auto master = c.current_master(device);
        devices.push_back({{"device", device.str()},
                           {"master", master ? json(*master) : json(nullptr)},
                           {"preference", prefs}});
    }
    return {{"instances", instances}, {"mastership", devices}, {"available", !c.initialized() || c.any_alive()}};
}

json to_json(const ControllerEvent& ev)
{
    return {{"seq", ev.seq}, {"kind", ev.kind}, {"subject", ev.subject}, {"detail", ev.detail}};
}

json summary_digest(const Controller& c)
{
    json intents = {{"SUBMITTED", 0}, {"INSTALLED", 0}, {"FAILED", 0}, {"WITHDRAWN", 0}};
    for (const auto& [_, in] : c.intents().intents())
        intents[std::string(to_string(in.state))] = intents[std::string(to_string(in.state))].get<int>() + 1;
    json circuits = {{"UP", 0}, {"DEGRADED", 0}, {"DOWN", 0}};
    for (const auto& [_, circuit] : c.l2sdx().circuits()) {
        if (circuit.admin_state == CircuitState::Removed)
            continue;
        auto key = std::string(to_string(c.l2sdx().circuit_status(circuit, c.intents(), c.network()).status));
        circuits[key] = circuits[key].get<int>() + 1;
    }
    return {{"intents", intents},
            {"rib_size", c.sdnip().best_routes().size()},
            {"circuits", circuits},
            {"flows", c.flows().size()}};
}

namespace {

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& s, const std::pair<const char*, Enum> (&table)[N], const char* what)
{
    for (const auto& [name, value] : table)
        if (s == name)
            return value;
    throw Error(ErrorCode::Validation, std::string("unknown ") + what + " '" + s + "'", s);
}

} // namespace

LinkState link_state_from_string(const std::string& s)
{
    static const std::pair<const char*, LinkState> table[] = {{"UP", LinkState::Up}, {"DOWN", LinkState::Down}};
    return enum_from(s, table, "link state");
}

DeviceState device_state_from_string(const std::string& s)
{
    static const std::pair<const char*, DeviceState> table[] = {{"UP", DeviceState::Up},
                                                                {"DOWN", DeviceState::Down}};
    return enum_from(s, table, "device state");
}

PacketHeader header_from_json(const json& j)
{
    if (!j.is_object())
        throw Error(ErrorCode::Validation, "header must be an object", "header");
    PacketHeader h;
    if (j.contains("eth_src"))
        h.eth_src = MacAddress::parse(require_string(j, "eth_src"));
    if (j.contains("eth_dst"))
        h.eth_dst = MacAddress::parse(require_string(j, "eth_dst"));
    if (j.contains("vlan") && !j["vlan"].is_null())
        h.vlan = checked_vlan(require_int(j, "vlan"));
    if (j.contains("ip_src"))
        h.ip_src = Ipv4Address::parse(require_string(j, "ip_src"));
    if (j.contains("ip_dst"))
        h.ip_dst = Ipv4Address::parse(require_string(j, "ip_dst"));
    if (j.contains("eth_type")) {
        static const std::pair<const char*, EthType> table[] = {{"IPV4", EthType::Ipv4}, {"OTHER", EthType::Other}};
        h.eth_type = enum_from(require_string(j, "eth_type"), table, "eth_type");
    } else if (h.ip_src || h.ip_dst) {
        h.eth_type = EthType::Ipv4;
    }
    if (h.eth_type == EthType::Ipv4) {
        // An IPv4 packet always carries both addresses; default the missing one.
        if (!h.ip_src)
            h.ip_src = Ipv4Address{};
        if (!h.ip_dst)
            h.ip_dst = Ipv4Address{};
    }
    if (j.contains("l4_kind")) {
        static const std::pair<const char*, L4Kind> table[] = {
            {"BGP_CTRL", L4Kind::BgpCtrl}, {"ICMP", L4Kind::Icmp}, {"DATA", L4Kind::Data}};
        h.l4_kind = enum_from(require_string(j, "l4_kind"), table, "l4_kind");
    }
    h.validate();
    return h;
}

Peer peer_from_json(const json& j, PeerKind kind)
{
    Peer p;
    p.name = require_string(j, "name");
    p.cp = ConnectPoint::parse(require_string(j, "cp"));
    p.ip = Ipv4Address::parse(require_string(j, "ip"));
    if (j.contains("vlan"))
        p.vlan = checked_vlan(require_int(j, "vlan"));
    if (j.contains("asn"))
        p.asn = static_cast<std::uint32_t>(require_int(j, "asn"));
    p.kind = kind;
    if (j.contains("kind")) {
        static const std::pair<const char*, PeerKind> table[] = {{"EXTERNAL", PeerKind::External},
                                                                 {"INTERNAL_SPEAKER", PeerKind::InternalSpeaker}};
        p.kind = enum_from(require_string(j, "kind"), table, "peer kind");
    }
    return p;
}

Route route_from_json(const json& j)
{
    Route r;
    r.prefix = Ipv4Prefix::parse(require_string(j, "prefix"));
    r.origin_peer = require_string(j, "peer");
    if (j.contains("as_path_len")) {
        long len = require_int(j, "as_path_len");
        if (len < 0)
            throw Error(ErrorCode::Validation, "as_path_len must be non-negative", "as_path_len");
        r.as_path_len = static_cast<std::uint32_t>(len);
    }
    return r;
}

} // namespace oxp
