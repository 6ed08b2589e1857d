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

#include "oxp/api.hpp"

#include <charconv>
#include <sstream>

#include "oxp/error.hpp"
#include "oxp/json_codec.hpp"
#include "oxp/scenario.hpp"

namespace oxp {

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

std::string percent_decode(std::string_view s, bool plus_is_space)
{
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex_value(s[i + 1]);
            int lo = hex_value(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(plus_is_space && s[i] == '+' ? ' ' : s[i]);
    }
    return out;
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> segs;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos)
            end = path.size();
        if (end > start)
            segs.push_back(percent_decode(path.substr(start, end - start), false));
        start = end + 1;
    }
    return segs;
}

std::map<std::string, std::string> parse_query(std::string_view q)
{
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    while (start < q.size()) {
        auto end = q.find('&', start);
        if (end == std::string_view::npos)
            end = q.size();
        auto pair = q.substr(start, end - start);
        auto eq = pair.find('=');
        if (!pair.empty())
            out[percent_decode(pair.substr(0, eq), true)] =
                eq == std::string_view::npos ? std::string{} : percent_decode(pair.substr(eq + 1), true);
        start = end + 1;
    }
    return out;
}

CircuitId parse_circuit_id(const std::string& s)
{
    CircuitId id = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::Validation, "circuit id must be a number: " + s, s);
    return id;
}

IntentId parse_intent_id(const std::string& s)
{
    IntentId id = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::Validation, "intent id must be a number: " + s, s);
    return id;
}

json ids_json(const std::vector<IntentId>& ids)
{
    json out = json::array();
    for (auto id : ids)
        out.push_back(id);
    return out;
}

json to_json_array(const std::vector<SessionStatus>& sessions)
{
    json out = json::array();
    for (const auto& s : sessions)
        out.push_back(to_json(s));
    return out;
}

json circuit_with_status(const Controller& c, const Circuit& circuit)
{
    json j = to_json(circuit);
    j["status"] = to_json(c.status(std::to_string(circuit.id)));
    return j;
}

} // namespace

int http_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::Parse: return 400;
    case ErrorCode::Isolation: return 403;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::NoPath: return 422;
    case ErrorCode::Unavailable: return 503;
    }
    return 500;
}

json error_body(const Error& e)
{
    return {{"code", to_string(e.code())}, {"message", e.what()}, {"subject", e.subject()}};
}

std::string Api::Call::arg(const char* key) const
{
    if (body.is_object() && body.contains(key))
        return require_string(body, key);
    if (auto it = query.find(key); it != query.end())
        return it->second;
    throw Error(ErrorCode::Validation, std::string("missing field '") + key + "'", key);
}

void Api::add(std::string method, std::string pattern, ReadHandler r, WriteHandler w)
{
    routes_.push_back({std::move(method), split_path(pattern), std::move(r), std::move(w)});
}

void Api::get(std::string pattern, ReadHandler h) { add("GET", std::move(pattern), std::move(h), {}); }
void Api::post(std::string pattern, WriteHandler h) { add("POST", std::move(pattern), {}, std::move(h)); }
void Api::del(std::string pattern, WriteHandler h) { add("DELETE", std::move(pattern), {}, std::move(h)); }

Api::Api(Topology base) : base_(std::move(base)), live_(base_)
{
    publish();

    // topology
    get("/topology", [](const Controller& c, const Call&) { return to_json(c.topology()); });
    post("/topology/links/{a}/{b}/state", [](Controller& c, const Call& call) {
        return to_json(c.set_link_state({call.param("a"), call.param("b")}, link_state_from_string(call.arg("state"))));
    });
    post("/topology/devices/{id}/state", [](Controller& c, const Call& call) {
        return to_json(c.set_device_state(DeviceId(call.param("id")), device_state_from_string(call.arg("state"))));
    });
    get("/events", [](const Controller& c, const Call&) {
        json out = json::array();
        for (const auto& ev : c.events())
            out.push_back(to_json(ev));
        return out;
    });
    get("/summary", [](const Controller& c, const Call&) { return summary_digest(c); });

    // intents and flows
    get("/intents", [](const Controller& c, const Call&) {
        json out = json::array();
        for (const auto& [id, in] : c.intents().intents())
            out.push_back(to_json(in));
        return out;
    });
    get("/intents/{id}", [](const Controller& c, const Call& call) {
        return to_json(c.intents().get(parse_intent_id(call.param("id"))));
    });
    get("/flows", [](const Controller& c, const Call&) { return to_json(c.flows().all()); });
    get("/flows/{device}", [](const Controller& c, const Call& call) {
        DeviceId dev(call.param("device"));
        if (!c.topology().devices().count(dev))
            throw Error(ErrorCode::NotFound, "unknown device " + dev.str(), dev.str());
        return to_json(c.flows().dump(dev));
    });
    add("POST", "/traverse", [](const Controller& c, const Call& call) {
        const json& body = call.body;
        if (!body.is_object())
            throw Error(ErrorCode::Validation, "traverse body must be an object");
        auto ingress = ConnectPoint::parse(require_string(body, "ingress"));
        json header = body.contains("header") ? body["header"] : body;
        if (!body.contains("header"))
            header.erase("ingress");
        return to_json(c.traverse(header_from_json(header), ingress));
    }, {});

    // sdnip
    post("/sdnip/activate", [](Controller& c, const Call& call) {
        std::vector<Peer> peers;
        for (const auto& j : call.body.value("peers", json::array()))
            peers.push_back(peer_from_json(j));
        auto ids = c.sdnip_activate(peers, peer_from_json(call.body.at("speaker"), PeerKind::InternalSpeaker));
        return json{{"intents", ids_json(ids)}, {"sessions", to_json_array(c.sdnip().sessions())}};
    });
    get("/sdnip/peers", [](const Controller& c, const Call&) {
        json peers = json::array();
        for (const auto& [name, p] : c.sdnip().peers())
            peers.push_back(to_json(p));
        json speaker = c.sdnip().speaker() ? to_json(*c.sdnip().speaker()) : json(nullptr);
        return json{{"speaker", speaker}, {"peers", peers}};
    });
    get("/sdnip/rib", [](const Controller& c, const Call&) { return rib_view(c.sdnip()); });
    get("/sdnip/sessions", [](const Controller& c, const Call&) { return to_json_array(c.sdnip().sessions()); });
    post("/sdnip/sessions/refresh", [](Controller& c, const Call&) { return to_json_array(c.refresh_sessions()); });
    post("/sdnip/peers", [](Controller& c, const Call& call) {
        Peer peer = peer_from_json(call.body);
        auto ids = c.add_peer(peer);
        return json{{"peer", to_json(*c.sdnip().find_peer(peer.name))}, {"intents", ids_json(ids)}};
    });
    del("/sdnip/peers/{name}", [](Controller& c, const Call& call) {
        c.remove_peer(call.param("name"));
        return json{{"removed", call.param("name")}};
    });
    post("/sdnip/routes", [](Controller& c, const Call& call) {
        Route r = route_from_json(call.body);
        return to_json(c.announce(r.origin_peer, r));
    });
    del("/sdnip/routes", [](Controller& c, const Call& call) {
        return to_json(c.withdraw_route(call.arg("peer"), Ipv4Prefix::parse(call.arg("prefix"))));
    });

    // l2sdx
    get("/l2sdx", [](const Controller& c, const Call&) { return l2sdx_view(c.l2sdx()); });
    post("/l2sdx/vxps", [](Controller& c, const Call& call) { return to_json(c.create_vxp(call.arg("name"))); });
    post("/l2sdx/connectors", [](Controller& c, const Call& call) {
        const auto& b = call.body;
        return to_json(
            c.add_connector(require_string(b, "vxp"), require_string(b, "name"),
                            ConnectPoint::parse(require_string(b, "cp")), require_int(b, "vlan")));
    });
    del("/l2sdx/connectors/{name}", [](Controller& c, const Call& call) {
        c.remove_connector(call.param("name"));
        return json{{"removed", call.param("name")}};
    });
    post("/l2sdx/circuits", [](Controller& c, const Call& call) {
        const auto& circuit = c.request_circuit(call.arg("a"), call.arg("b"));
        return circuit_with_status(c, circuit);
    });
    del("/l2sdx/circuits/{id}", [](Controller& c, const Call& call) {
        auto id = parse_circuit_id(call.param("id"));
        c.remove_circuit(id);
        return json{{"removed", id}};
    });
    get("/l2sdx/status/{subject}", [](const Controller& c, const Call& call) {
        return to_json(c.status(call.param("subject")));
    });

    // cluster
    get("/cluster", [](const Controller& c, const Call&) { return to_json(c.cluster()); });
    post("/cluster/init", [](Controller& c, const Call& call) {
        c.init_cluster(call.body.at("instances").get<std::vector<std::string>>());
        return to_json(c.cluster());
    });
    post("/cluster/fail/{id}", [](Controller& c, const Call& call) { return to_json(c.fail_instance(call.param("id"))); });
    post("/cluster/recover/{id}", [](Controller& c, const Call& call) {
        return to_json(c.recover_instance(call.param("id")));
    });

    // Scenarios always start from the configured topology.
    post("/scenario", [this](Controller& c, const Call& call) {
        const json& b = call.body;
        auto steps = parse_scenario(b.is_object() && b.contains("steps") ? b["steps"] : b);
        c = Controller(base_);
        return to_json(ScenarioRunner(c).run(steps));
    });
}

void Api::publish()
{
    auto snap = std::make_shared<const Controller>(live_);
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = std::move(snap);
}

std::shared_ptr<const Controller> Api::snapshot() const
{
    std::lock_guard lock(snapshot_mu_);
    return snapshot_;
}

json Api::run_scenario(const json& steps)
{
    return handle("POST", "/scenario", steps.dump()).body;
}

ApiResponse Api::handle(std::string_view method, std::string_view target, std::string_view body)
{
    auto qpos = target.find('?');
    auto segs = split_path(target.substr(0, qpos));
    Call call;
    if (qpos != std::string_view::npos)
        call.query = parse_query(target.substr(qpos + 1));

    const Endpoint* route = nullptr;
    bool path_known = false;
    for (const auto& r : routes_) {
        if (r.pattern.size() != segs.size())
            continue;
        std::map<std::string, std::string> captures;
        bool ok = true;
        for (std::size_t i = 0; i < segs.size() && ok; ++i) {
            const auto& p = r.pattern[i];
            if (p.size() > 2 && p.front() == '{' && p.back() == '}')
                captures[p.substr(1, p.size() - 2)] = segs[i];
            else
                ok = p == segs[i];
        }
        if (!ok)
            continue;
        path_known = true;
        if (r.method == method) {
            route = &r;
            call.params = std::move(captures);
            break;
        }
    }
    std::string path(target.substr(0, qpos));
    if (!route) {
        Error e(ErrorCode::NotFound, path_known ? "method " + std::string(method) + " not allowed on " + path
                                                : "no such endpoint " + path,
                path);
        return {path_known ? 405 : 404, error_body(e)};
    }

    try {
        if (!body.empty() && body.find_first_not_of(" \t\r\n") != std::string_view::npos) {
            try {
                call.body = json::parse(body);
            } catch (const json::parse_error& e) {
                throw Error(ErrorCode::Parse, std::string("malformed JSON body: ") + e.what());
            }
        } else {
            call.body = json::object();
        }

        if (route->read)
            return {200, route->read(*snapshot(), call)};

        std::lock_guard lock(writer_);
        try {
            json out = route->write(live_, call);
            publish();
            return {200, out};
        } catch (...) {
            publish();
            throw;
        }
    } catch (const Error& e) {
        return {http_status(e.code()), error_body(e)};
    } catch (const json::exception& e) {
        return {400, error_body(Error(ErrorCode::Validation, e.what()))};
    } catch (const std::invalid_argument& e) {
        return {400, error_body(Error(ErrorCode::Validation, e.what()))};
    } catch (const std::out_of_range& e) {
        return {404, error_body(Error(ErrorCode::NotFound, e.what()))};
    }
}

} // namespace oxp
