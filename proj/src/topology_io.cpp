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

#include "oxp/topology_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "oxp/error.hpp"

namespace oxp {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!obj.is_object())
        throw Error(ErrorCode::Validation, where + " must be an object", where);
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw Error(ErrorCode::Validation, "unknown field '" + key + "' in " + where, key);
    }
}

std::string required_string(const json& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error(ErrorCode::Validation, where + " requires string field '" + key + "'", where);
    return it->get<std::string>();
}

const json& array_field(const json& doc, const char* key)
{
    static const json empty = json::array();
    auto it = doc.find(key);
    if (it == doc.end())
        return empty;
    if (!it->is_array())
        throw Error(ErrorCode::Validation, std::string("'") + key + "' must be an array", key);
    return *it;
}

} // namespace

Topology load_topology(const json& doc)
{
    reject_unknown(doc, {"devices", "links", "hosts"}, "topology document");
    Topology topo;
    for (const auto& d : array_field(doc, "devices")) {
        reject_unknown(d, {"id", "ports"}, "device");
        std::string id = required_string(d, "id", "device");
        auto ports = d.find("ports");
        if (ports == d.end() || !ports->is_number_integer() || ports->get<long>() <= 0)
            throw Error(ErrorCode::Validation, "device " + id + " requires a positive 'ports' count", id);
        topo.add_device(DeviceId(id), ports->get<PortNumber>());
    }
    for (const auto& l : array_field(doc, "links")) {
        reject_unknown(l, {"a", "b"}, "link");
        topo.add_link(ConnectPoint::parse(required_string(l, "a", "link")),
                      ConnectPoint::parse(required_string(l, "b", "link")));
    }
    for (const auto& h : array_field(doc, "hosts")) {
        reject_unknown(h, {"cp", "name", "mac", "ip"}, "host");
        Host host{ConnectPoint::parse(required_string(h, "cp", "host")), h.value("name", ""),
                  h.value("mac", ""), h.value("ip", "")};
        if (!host.mac.empty())
            MacAddress::parse(host.mac);
        if (!host.ip.empty())
            Ipv4Address::parse(host.ip);
        topo.add_host(std::move(host));
    }
    return topo;
}

Topology load_topology(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, std::string("malformed topology document: ") + e.what());
    }
    return load_topology(doc);
}

Topology load_topology_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::NotFound, "cannot open topology file " + path.string(), path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_topology(std::string_view(ss.str()));
}

json topology_document(const Topology& topo)
{
    json devices = json::array();
    for (const auto& [id, d] : topo.devices())
        devices.push_back({{"id", id.str()}, {"ports", d.ports}});
    json links = json::array();
    for (const auto& l : topo.links())
        links.push_back({{"a", l.a.to_string()}, {"b", l.b.to_string()}});
    json hosts = json::array();
    for (const auto& h : topo.hosts())
        hosts.push_back({{"cp", h.cp.to_string()}, {"name", h.name}, {"mac", h.mac}, {"ip", h.ip}});
    return {{"devices", devices}, {"links", links}, {"hosts", hosts}};
}

std::string_view gts7_document()
{
    return R"({
  "devices": [
    {"id": "AMS", "ports": 8}, {"id": "BRA", "ports": 8}, {"id": "LON", "ports": 8},
    {"id": "MIL", "ports": 8}, {"id": "POP6", "ports": 8}, {"id": "POP7", "ports": 8},
    {"id": "PRG", "ports": 8}
  ],
  "links": [
    {"a": "AMS/1", "b": "LON/1"},
    {"a": "LON/2", "b": "PRG/1"},
    {"a": "PRG/2", "b": "BRA/1"},
    {"a": "BRA/2", "b": "MIL/1"},
    {"a": "MIL/2", "b": "POP6/1"},
    {"a": "POP6/2", "b": "POP7/1"},
    {"a": "POP7/2", "b": "AMS/2"},
    {"a": "AMS/3", "b": "MIL/3"},
    {"a": "LON/3", "b": "BRA/3"}
  ],
  "hosts": [
    {"cp": "AMS/5", "name": "speaker", "mac": "02:00:00:00:00:01", "ip": "10.0.0.1"},
    {"cp": "LON/4", "name": "peer-lon", "mac": "02:00:00:00:00:11", "ip": "10.0.0.11"},
    {"cp": "BRA/4", "name": "peer-bra", "mac": "02:00:00:00:00:12", "ip": "10.0.0.12"},
    {"cp": "MIL/4", "name": "peer-mil", "mac": "02:00:00:00:00:13", "ip": "10.0.0.13"},
    {"cp": "PRG/4", "name": "peer-prg", "mac": "02:00:00:00:00:14", "ip": "10.0.0.14"}
  ]
})";
}

Topology gts7()
{
    return load_topology(gts7_document());
}

Topology load_named_topology(const std::string& source)
{
    if (source == "gts7" || source == "builtin:gts7")
        return gts7();
    return load_topology_file(source);
}

} // namespace oxp
