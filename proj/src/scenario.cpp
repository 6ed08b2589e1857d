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

#include "oxp/scenario.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "oxp/error.hpp"
#include "oxp/json_codec.hpp"
#include "oxp/topology_io.hpp"

namespace oxp {

namespace {

constexpr std::array kActions = {
    "LOAD_TOPOLOGY", "INIT_CLUSTER",    "SDNIP_ACTIVATE", "ADD_PEER",  "ANNOUNCE",     "WITHDRAW",
    "CREATE_VXP",    "ADD_CONNECTOR",   "REQUEST_CIRCUIT", "REMOVE_CIRCUIT", "LINK_DOWN", "LINK_UP",
    "FAIL_INSTANCE", "RECOVER_INSTANCE", "ASSERT",
};

constexpr std::array kChecks = {
    "SESSION_ESTABLISHED", "DELIVERED", "FLOWS_UNCHANGED_EXCEPT", "STATUS_IS", "MASTER_ALIVE",
};

template <typename Array>
bool contains(const Array& names, const std::string& s)
{
    return std::find(names.begin(), names.end(), s) != names.end();
}

int line_of(std::string_view text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

/// Start lines of the objects directly inside the top-level array.
std::vector<int> step_lines(std::string_view text)
{
    std::vector<int> lines;
    int depth = 0;
    int line = 1;
    bool in_string = false;
    bool escape = false;
    for (char ch : text) {
        if (ch == '\n')
            ++line;
        if (in_string) {
            if (escape)
                escape = false;
            else if (ch == '\\')
                escape = true;
            else if (ch == '"')
                in_string = false;
            continue;
        }
        switch (ch) {
        case '"': in_string = true; break;
        case '{':
            if (depth == 1)
                lines.push_back(line);
            ++depth;
            break;
        case '[': ++depth; break;
        case '}':
        case ']': --depth; break;
        default: break;
        }
    }
    return lines;
}

std::string where(const ScenarioStep& step, std::size_t index)
{
    std::string s = "step " + std::to_string(index + 1);
    if (step.line > 0)
        s += " (line " + std::to_string(step.line) + ")";
    return s;
}

std::vector<ScenarioStep> build_steps(const json& doc, const std::vector<int>& lines)
{
    if (!doc.is_array())
        throw Error(ErrorCode::Parse, "scenario must be a JSON array of steps (line 1)");
    std::vector<ScenarioStep> steps;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        ScenarioStep step;
        step.line = i < lines.size() ? lines[i] : 0;
        const auto& s = doc[i];
        if (!s.is_object() || !s.contains("action") || !s["action"].is_string())
            throw Error(ErrorCode::Parse, where(step, i) + ": expected an object with a string 'action'");
        step.action = s["action"].get<std::string>();
        if (!contains(kActions, step.action))
            throw Error(ErrorCode::Parse, where(step, i) + ": unknown action '" + step.action + "'", step.action);
        if (s.contains("params")) {
            if (!s["params"].is_object())
                throw Error(ErrorCode::Parse, where(step, i) + ": 'params' must be an object");
            step.params = s["params"];
        }
        if (step.action == "ASSERT") {
            auto check = step.params.value("check", std::string{});
            if (!contains(kChecks, check))
                throw Error(ErrorCode::Parse, where(step, i) + ": ASSERT needs a check kind, got '" + check + "'");
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

ConnectPoint cp_field(const json& j, const char* key)
{
    return ConnectPoint::parse(require_string(j, key));
}

} // namespace

std::vector<ScenarioStep> parse_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorCode::Parse, "scenario parse error at line " + std::to_string(line) + ": " + e.what(),
                    std::to_string(line));
    }
    return build_steps(doc, step_lines(text));
}

std::vector<ScenarioStep> parse_scenario(const json& steps)
{
    return build_steps(steps, {});
}

std::vector<ScenarioStep> load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::NotFound, "cannot open scenario " + path.string(), path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(std::string_view(ss.str()));
}

nlohmann::json scenario_request(const std::filesystem::path& path)
{
    auto dir = std::filesystem::absolute(path).parent_path();
    auto array = nlohmann::json::array();
    for (auto s : load_scenario_file(path)) {
        if (s.action == "LOAD_TOPOLOGY" && s.params.contains("path") && s.params["path"].is_string()) {
            std::filesystem::path p = s.params["path"].get<std::string>();
            if (p.is_relative())
                s.params["path"] = (dir / p).string();
        }
        array.push_back({{"action", s.action}, {"params", s.params}});
    }
    return array;
}

ScenarioReport ScenarioRunner::run(const std::vector<ScenarioStep>& steps)
{
    ScenarioReport report;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        StepOutcome out{i + 1, steps[i].action, false, {}};
        try {
            out.detail = execute(steps[i]);
            out.ok = true;
        } catch (const Error& e) {
            out.detail = std::string(to_string(e.code())) + ": " + e.what();
        } catch (const std::exception& e) {
            out.detail = e.what();
        }
        (out.ok ? report.ok : report.failed)++;
        report.steps.push_back(std::move(out));
    }
    report.digest = summary_digest(controller_);
    return report;
}

std::string ScenarioRunner::execute(const ScenarioStep& step)
{
    const auto& p = step.params;
    auto& c = controller_;
    const auto& a = step.action;

    if (a == "LOAD_TOPOLOGY") {
        if (p.contains("builtin"))
            c.load_topology(load_named_topology(require_string(p, "builtin")));
        else if (p.contains("path")) {
            std::filesystem::path path = require_string(p, "path");
            if (path.is_relative() && !base_dir_.empty())
                path = base_dir_ / path;
            c.load_topology(load_topology_file(path));
        } else if (p.contains("topology"))
            c.load_topology(load_topology(p["topology"]));
        else
            throw Error(ErrorCode::Validation, "LOAD_TOPOLOGY needs 'builtin', 'path' or 'topology'");
        before_peer_added_.clear();
        return std::to_string(c.topology().devices().size()) + " devices, " +
               std::to_string(c.topology().links().size()) + " links";
    }
    if (a == "INIT_CLUSTER") {
        c.init_cluster(p.at("instances").get<std::vector<std::string>>());
        return std::to_string(c.cluster().instances().size()) + " instances";
    }
    if (a == "SDNIP_ACTIVATE") {
        std::vector<Peer> peers;
        for (const auto& j : p.value("peers", json::array()))
            peers.push_back(peer_from_json(j));
        auto ids = c.sdnip_activate(peers, peer_from_json(p.at("speaker"), PeerKind::InternalSpeaker));
        return std::to_string(ids.size()) + " session intents";
    }
    if (a == "ADD_PEER") {
        Peer peer = peer_from_json(p);
        Controller before = c;
        auto ids = c.add_peer(peer);
        before_peer_added_.insert_or_assign(peer.name, std::move(before));
        return std::to_string(ids.size()) + " session intents";
    }
    if (a == "ANNOUNCE") {
        Route r = route_from_json(p);
        auto delta = c.announce(r.origin_peer, r);
        return r.prefix.to_string() + (delta.new_best ? " best via " + delta.new_best->origin_peer : "");
    }
    if (a == "WITHDRAW") {
        auto prefix = Ipv4Prefix::parse(require_string(p, "prefix"));
        c.withdraw_route(require_string(p, "peer"), prefix);
        return prefix.to_string() + " withdrawn";
    }
    if (a == "CREATE_VXP")
        return "VXP " + c.create_vxp(require_string(p, "name")).name;
    if (a == "ADD_CONNECTOR") {
        const auto& conn = c.add_connector(require_string(p, "vxp"), require_string(p, "name"), cp_field(p, "cp"),
                                           require_int(p, "vlan"));
        return "connector " + conn.name;
    }
    if (a == "REQUEST_CIRCUIT") {
        const auto& circuit = c.request_circuit(require_string(p, "a"), require_string(p, "b"));
        return "circuit " + std::to_string(circuit.id) + " " + std::string(to_string(circuit.admin_state));
    }
    if (a == "REMOVE_CIRCUIT") {
        CircuitId id = 0;
        if (p.contains("id"))
            id = static_cast<CircuitId>(require_int(p, "id"));
        else if (const auto* circuit = c.l2sdx().circuit_of(require_string(p, "connector")))
            id = circuit->id;
        else
            throw Error(ErrorCode::NotFound, "no live circuit on connector " + require_string(p, "connector"));
        c.remove_circuit(id);
        return "circuit " + std::to_string(id) + " removed";
    }
    if (a == "LINK_DOWN" || a == "LINK_UP") {
        auto change = c.set_link_state({require_string(p, "a"), require_string(p, "b")},
                                       a == "LINK_DOWN" ? LinkState::Down : LinkState::Up);
        return std::to_string(change.events.size()) + " events, " + std::to_string(change.recompiled.size()) +
               " intents recompiled";
    }
    if (a == "FAIL_INSTANCE" || a == "RECOVER_INSTANCE") {
        auto id = require_string(p, "id");
        auto change = a == "FAIL_INSTANCE" ? c.fail_instance(id) : c.recover_instance(id);
        return std::to_string(change.reassignments.size()) + " devices reassigned" +
               (change.all_dead ? "; all instances DEAD" : "");
    }
    if (a == "ASSERT")
        return check(p);
    throw Error(ErrorCode::Validation, "unknown action " + a, a);
}

std::string ScenarioRunner::check(const json& p)
{
    auto& c = controller_;
    auto kind = require_string(p, "check");
    auto fail = [&](const std::string& msg) -> std::string { throw Error(ErrorCode::Validation, kind + ": " + msg); };

    if (kind == "SESSION_ESTABLISHED") {
        if (p.contains("peer")) {
            auto name = require_string(p, "peer");
            for (const auto& s : c.refresh_sessions())
                if (s.peer == name)
                    return s.state == SessionState::Established ? "session " + name + " ESTABLISHED"
                                                                : fail("session " + name + " is IDLE");
            return fail("unknown peer " + name);
        }
        // Ad-hoc BGP session between two endpoints, e.g. across an L2 circuit.
        auto endpoint = [&](const char* key) {
            const auto& j = p.at(key);
            Peer e;
            e.name = key;
            e.cp = cp_field(j, "cp");
            e.vlan = checked_vlan(require_int(j, "vlan"));
            e.ip = Ipv4Address::parse(require_string(j, "ip"));
            return e;
        };
        Peer x = endpoint("a");
        Peer y = endpoint("b");
        auto xy = c.traverse(SdnIp::bgp_packet(x, y), x.cp);
        auto yx = c.traverse(SdnIp::bgp_packet(y, x), y.cp);
        if (!(xy.delivered_at(y.cp) && xy.final_header.vlan == y.vlan))
            return fail("BGP from " + x.cp.to_string() + " not delivered at " + y.cp.to_string());
        if (!(yx.delivered_at(x.cp) && yx.final_header.vlan == x.vlan))
            return fail("BGP from " + y.cp.to_string() + " not delivered at " + x.cp.to_string());
        return "BGP session " + x.cp.to_string() + " <-> " + y.cp.to_string() + " ESTABLISHED";
    }
    if (kind == "DELIVERED") {
        auto ingress = cp_field(p, "ingress");
        auto header = header_from_json(p.value("header", json::object()));
        auto result = c.traverse(header, ingress);
        const auto& expect = p.at("expect");
        auto egress = cp_field(expect, "egress");
        if (!result.delivered_at(egress))
            return fail("expected delivery at " + egress.to_string() + ", got " +
                        std::string(to_string(result.disposition)) +
                        (result.egress ? " at " + result.egress->to_string() : "") +
                        (result.reason.empty() ? "" : " (" + result.reason + ")"));
        if (expect.contains("vlan")) {
            auto vlan = checked_vlan(require_int(expect, "vlan"));
            if (result.final_header.vlan != vlan)
                return fail("delivered with VLAN " +
                            (result.final_header.vlan ? std::to_string(*result.final_header.vlan) : "none") +
                            ", expected " + std::to_string(vlan));
        }
        return "delivered at " + egress.to_string() +
               (result.final_header.vlan ? " vlan " + std::to_string(*result.final_header.vlan) : "");
    }
    if (kind == "FLOWS_UNCHANGED_EXCEPT") {
        auto name = require_string(p, "peer");
        auto it = before_peer_added_.find(name);
        if (it == before_peer_added_.end())
            return fail("no ADD_PEER recorded for " + name);
        auto before = flow_keys(it->second);
        auto after = preexisting_flow_keys(it->second, c);
        if (before != after)
            return fail(std::to_string(before.size()) + " preexisting rules before, " + std::to_string(after.size()) +
                        " matching after");
        return std::to_string(before.size()) + " preexisting rules unchanged";
    }
    if (kind == "STATUS_IS") {
        auto subject = p.at("subject").is_string() ? p["subject"].get<std::string>() : p["subject"].dump();
        auto want = require_string(p, "status");
        auto got = c.status(subject);
        if (to_string(got.status) != want)
            return fail(subject + " is " + std::string(to_string(got.status)) + ", expected " + want +
                        (got.detail.empty() ? "" : " (" + got.detail + ")"));
        return subject + " " + want;
    }
    if (kind == "MASTER_ALIVE") {
        const auto& cl = c.cluster();
        if (!cl.initialized())
            return fail("cluster not initialized");
        for (const auto& [device, master] : cl.masters()) {
            if (!master)
                return fail("device " + device.str() + " has no ALIVE master");
            if (p.contains("device") && device.str() == require_string(p, "device") && p.contains("master") &&
                *master != require_string(p, "master"))
                return fail("device " + device.str() + " mastered by " + *master);
        }
        return std::to_string(cl.masters().size()) + " devices have an ALIVE master";
    }
    return fail("unknown check");
}

ScenarioReport run_scenario_file(const std::filesystem::path& path, Controller& fresh)
{
    auto steps = load_scenario_file(path);
    ScenarioRunner runner(fresh, path.parent_path());
    return runner.run(steps);
}

json to_json(const ScenarioReport& report)
{
    json steps = json::array();
    for (const auto& s : report.steps)
        steps.push_back({{"index", s.index}, {"action", s.action}, {"outcome", s.ok ? "OK" : "FAILED"},
                         {"detail", s.detail}});
    return {{"steps", steps},
            {"summary", {{"total", report.steps.size()}, {"ok", report.ok}, {"failed", report.failed}}},
            {"passed", report.passed()},
            {"digest", report.digest}};
}

} // namespace oxp
