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

#include "oxp/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "oxp/json_codec.hpp"
#include "oxp/scenario.hpp"
#include "oxp/service.hpp"

namespace oxp {

namespace {

constexpr const char* kDefaultServer = "http://127.0.0.1:8181";

std::string match_text(const json& m)
{
    std::string s;
    for (const auto& [k, v] : m.items()) {
        if (!s.empty())
            s += ",";
        s += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    return s.empty() ? "*" : s;
}

std::string actions_text(const json& actions)
{
    std::string s;
    for (const auto& a : actions) {
        if (!s.empty())
            s += ",";
        auto type = a["type"].get<std::string>();
        if (type == "SET_VLAN")
            s += "SET_VLAN:" + a["vlan"].dump();
        else if (type == "OUTPUT")
            s += "OUTPUT:" + a["port"].dump();
        else
            s += type;
    }
    return s;
}

std::string str(const json& v)
{
    if (v.is_null())
        return "-";
    return v.is_string() ? v.get<std::string>() : v.dump();
}

void render_topology(std::ostream& out, const json& t)
{
    out << "devices:\n";
    for (const auto& d : t["devices"])
        out << "  " << std::left << std::setw(8) << str(d["id"]) << " ports=" << d["ports"].dump() << " "
            << str(d["state"]) << "\n";
    out << "links:\n";
    for (const auto& l : t["links"])
        out << "  " << std::setw(8) << str(l["a"]) << " <-> " << std::setw(8) << str(l["b"]) << " "
            << str(l["state"]) << "\n";
    if (!t["hosts"].empty()) {
        out << "hosts:\n";
        for (const auto& h : t["hosts"])
            out << "  " << std::setw(8) << str(h["cp"]) << " " << str(h["name"]) << " " << str(h["ip"]) << "\n";
    }
}

void render_flows(std::ostream& out, const json& rules)
{
    std::size_t width = 5;
    for (const auto& r : rules)
        width = std::max(width, match_text(r["match"]).size());
    out << std::left << std::setw(6) << "ID" << std::setw(7) << "DEVICE" << std::setw(8) << "PRIO" << std::setw(7)
        << "OWNER" << std::setw(7) << "INTENT" << std::setw(static_cast<int>(width + 2)) << "MATCH"
        << "ACTIONS\n";
    for (const auto& r : rules)
        out << std::setw(6) << str(r["id"]) << std::setw(7) << str(r["device"]) << std::setw(8) << str(r["priority"])
            << std::setw(7) << str(r["owner"]) << std::setw(7) << str(r["intent"])
            << std::setw(static_cast<int>(width + 2)) << match_text(r["match"]) << actions_text(r["actions"]) << "\n";
    out << rules.size() << " rules\n";
}

void render_change(std::ostream& out, const json& c)
{
    for (const auto& ev : c["events"])
        out << str(ev["kind"]) << " " << str(ev["subject"]) << "\n";
    out << c["recompiled"].size() << " intents recompiled\n";
}

void render_intents(std::ostream& out, const json& intents)
{
    out << std::left << std::setw(5) << "ID" << std::setw(7) << "KIND" << std::setw(11) << "STATE" << std::setw(7)
        << "OWNER" << std::setw(22) << "INGRESS" << std::setw(9) << "EGRESS"
        << "SELECTOR\n";
    for (const auto& in : intents) {
        std::string ingress;
        if (in.contains("ingress"))
            ingress = str(in["ingress"]);
        else
            for (const auto& cp : in["ingresses"])
                ingress += (ingress.empty() ? "" : ",") + cp.get<std::string>();
        out << std::setw(5) << str(in["id"]) << std::setw(7) << str(in["kind"]) << std::setw(11) << str(in["state"])
            << std::setw(7) << str(in["owner"]) << std::setw(22) << (ingress.empty() ? "-" : ingress) << std::setw(9)
            << str(in["egress"]) << match_text(in["selector"]);
        if (in.contains("detail"))
            out << "  (" << str(in["detail"]) << ")";
        out << "\n";
    }
}

void render_trace(std::ostream& out, const json& r)
{
    out << "trace:";
    for (const auto& h : r["hops"])
        out << " " << str(h);
    out << "\n" << str(r["disposition"]);
    if (r.contains("egress"))
        out << " at " << str(r["egress"]);
    if (r.contains("device"))
        out << " on " << str(r["device"]);
    const auto& fh = r["final_header"];
    out << " vlan " << (fh["vlan"].is_null() ? "none" : fh["vlan"].dump());
    if (r.contains("reason"))
        out << " (" << str(r["reason"]) << ")";
    out << "\n";
}

void render_report(std::ostream& out, const json& report)
{
    for (const auto& s : report["steps"])
        out << std::right << std::setw(3) << str(s["index"]) << " " << std::left << std::setw(17) << str(s["action"])
            << std::setw(7) << str(s["outcome"]) << str(s["detail"]) << "\n";
    const auto& sum = report["summary"];
    out << "steps: " << sum["total"] << " ok: " << sum["ok"] << " failed: " << sum["failed"] << "\n";
}

void render_cluster(std::ostream& out, const json& c)
{
    out << "instances:\n";
    for (const auto& i : c["instances"])
        out << "  " << std::left << std::setw(8) << str(i["id"]) << str(i["state"]) << "\n";
    out << "mastership:\n";
    for (const auto& d : c["mastership"]) {
        out << "  " << std::setw(8) << str(d["device"]) << std::setw(8) << str(d["master"]) << "[";
        std::string sep;
        for (const auto& p : d["preference"]) {
            out << sep << p.get<std::string>();
            sep = " ";
        }
        out << "]\n";
    }
}

void render_generic(std::ostream& out, const json& j)
{
    out << j.dump(2) << "\n";
}

struct Request {
    std::string method;
    std::string target;
    json body;
    std::function<void(std::ostream&, const json&)> render = render_generic;
};

} // namespace

std::string encode_segment(const std::string& s)
{
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char ch : s) {
        if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.' || ch == '~') {
            out.push_back(static_cast<char>(ch));
        } else {
            out.push_back('%');
            out.push_back(hex[ch >> 4]);
            out.push_back(hex[ch & 15]);
        }
    }
    return out;
}

Transport http_transport(const std::string& url)
{
    auto client = std::make_shared<httplib::Client>(url);
    client->set_connection_timeout(5);
    client->set_read_timeout(60);
    return [client, url](const std::string& method, const std::string& target, const std::string& body) {
        httplib::Result res{nullptr, httplib::Error::Unknown};
        if (method == "GET")
            res = client->Get(target);
        else if (method == "POST")
            res = client->Post(target, body, "application/json");
        else
            res = client->Delete(target, body, "application/json");
        if (!res) {
            Error e(ErrorCode::Unavailable, "cannot reach controller at " + url + ": " + httplib::to_string(res.error()),
                    url);
            return ApiResponse{503, error_body(e)};
        }
        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::parse_error&) {
            parsed = {{"code", "PARSE"}, {"message", "non-JSON reply: " + res->body}, {"subject", target}};
        }
        return ApiResponse{res->status, parsed};
    };
}

Transport local_transport(Api& api)
{
    return [&api](const std::string& method, const std::string& target, const std::string& body) {
        return api.handle(method, target, body);
    };
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Transport* transport)
{
    CLI::App app{"oxpctl: operate the OXP controller", "oxpctl"};
    app.require_subcommand(1);
    bool as_json = false;
    bool local = false;
    std::string server;
    app.add_flag("--json", as_json, "Print raw JSON replies");
    app.add_option("--server", server, "Controller URL (default $OXP_SERVER or " + std::string(kDefaultServer) + ")");
    app.add_flag("--local", local, "Run against an in-process controller built from $OXP_CONFIG");

    Request req;
    std::function<int()> custom; // verbs that do more than one call

    // topology
    auto* topo = app.add_subcommand("topology", "Topology inspection and link control");
    topo->require_subcommand(1);
    topo->add_subcommand("show", "Show devices, links and hosts")->callback([&] {
        req = {"GET", "/topology", {}, render_topology};
    });
    std::string link_a, link_b;
    for (const char* verb : {"link-down", "link-up"}) {
        auto* cmd = topo->add_subcommand(verb, std::string("Set a link ") + (verb[5] == 'd' ? "DOWN" : "UP"));
        cmd->add_option("a", link_a, "Device or connect point")->required();
        cmd->add_option("b", link_b, "Device or connect point")->required();
        std::string state = verb[5] == 'd' ? "DOWN" : "UP";
        cmd->callback([&, state] {
            req = {"POST", "/topology/links/" + encode_segment(link_a) + "/" + encode_segment(link_b) + "/state",
                   {{"state", state}}, render_change};
        });
    }

    // intents and flows
    auto* intent = app.add_subcommand("intent", "Intent inspection");
    intent->require_subcommand(1);
    intent->add_subcommand("list", "List intents")->callback([&] { req = {"GET", "/intents", {}, render_intents}; });

    auto* flows = app.add_subcommand("flows", "Flow table inspection");
    flows->require_subcommand(1);
    std::string flow_device;
    auto* dump = flows->add_subcommand("dump", "Dump the flow table of a device");
    dump->add_option("device", flow_device, "Device id")->required();
    dump->callback([&] { req = {"GET", "/flows/" + encode_segment(flow_device), {}, render_flows}; });

    // sdnip
    auto* sdnip = app.add_subcommand("sdnip", "SDN-IP peering and routes");
    sdnip->require_subcommand(1);
    sdnip->add_subcommand("peers", "List BGP peers")->callback([&] {
        req = {"GET", "/sdnip/peers", {}, [](std::ostream& o, const json& j) {
                   if (!j["speaker"].is_null())
                       o << "speaker " << str(j["speaker"]["name"]) << " " << str(j["speaker"]["cp"]) << " vlan "
                         << str(j["speaker"]["vlan"]) << " " << str(j["speaker"]["ip"]) << "\n";
                   for (const auto& p : j["peers"])
                       o << "peer    " << str(p["name"]) << " " << str(p["cp"]) << " vlan " << str(p["vlan"]) << " "
                         << str(p["ip"]) << "\n";
               }};
    });
    sdnip->add_subcommand("rib", "Show the RIB")->callback([&] {
        req = {"GET", "/sdnip/rib", {}, [](std::ostream& o, const json& rib) {
                   for (const auto& e : rib) {
                       o << std::left << std::setw(20) << str(e["prefix"]);
                       if (e.contains("best"))
                           o << "best " << str(e["best"]["peer"]) << " as_path_len " << str(e["best"]["as_path_len"]);
                       o << " (" << e["routes"].size() << " candidates)";
                       if (e.contains("intent"))
                           o << " intent " << str(e["intent"]);
                       o << "\n";
                   }
                   o << rib.size() << " prefixes\n";
               }};
    });
    sdnip->add_subcommand("sessions", "Show BGP session states")->callback([&] {
        req = {"POST", "/sdnip/sessions/refresh", {}, [](std::ostream& o, const json& s) {
                   for (const auto& x : s)
                       o << std::left << std::setw(16) << str(x["peer"]) << str(x["state"]) << "\n";
               }};
    });
    std::string peer_name, peer_cp, peer_ip;
    int peer_vlan = -1;
    auto* add_peer = sdnip->add_subcommand("add-peer", "Add an external BGP peer");
    add_peer->add_option("name", peer_name)->required();
    add_peer->add_option("cp", peer_cp, "Connect point, e.g. PRG/4")->required();
    add_peer->add_option("ip", peer_ip)->required();
    add_peer->add_option("--vlan", peer_vlan, "Peering VLAN (default 10)");
    add_peer->callback([&] {
        json body{{"name", peer_name}, {"cp", peer_cp}, {"ip", peer_ip}};
        if (peer_vlan >= 0)
            body["vlan"] = peer_vlan;
        req = {"POST", "/sdnip/peers", body};
    });
    std::string route_peer, route_prefix;
    int as_path_len = -1;
    auto* announce = sdnip->add_subcommand("announce", "Announce a route from a peer");
    announce->add_option("peer", route_peer)->required();
    announce->add_option("prefix", route_prefix)->required();
    announce->add_option("--as-path-len", as_path_len);
    announce->callback([&] {
        json body{{"peer", route_peer}, {"prefix", route_prefix}};
        if (as_path_len >= 0)
            body["as_path_len"] = as_path_len;
        req = {"POST", "/sdnip/routes", body};
    });
    auto* withdraw = sdnip->add_subcommand("withdraw", "Withdraw a route");
    withdraw->add_option("peer", route_peer)->required();
    withdraw->add_option("prefix", route_prefix)->required();
    withdraw->callback([&] { req = {"DELETE", "/sdnip/routes", {{"peer", route_peer}, {"prefix", route_prefix}}}; });

    // l2sdx
    auto* l2 = app.add_subcommand("l2sdx", "Layer 2 exchange: VXPs, connectors, circuits");
    l2->require_subcommand(1);
    l2->add_subcommand("show", "Show VXPs, connectors and circuits")->callback([&] { req = {"GET", "/l2sdx", {}}; });
    std::string vxp_name, conn_name, conn_cp, circ_a, circ_b, circ_id, subject;
    int conn_vlan = 0;
    auto* vxp_create = l2->add_subcommand("vxp-create", "Create a virtual exchange point");
    vxp_create->add_option("name", vxp_name)->required();
    vxp_create->callback([&] { req = {"POST", "/l2sdx/vxps", {{"name", vxp_name}}}; });
    auto* conn_add = l2->add_subcommand("connector-add", "Add an edge connector to a VXP");
    conn_add->add_option("vxp", vxp_name)->required();
    conn_add->add_option("name", conn_name)->required();
    conn_add->add_option("cp", conn_cp)->required();
    conn_add->add_option("vlan", conn_vlan)->required();
    conn_add->callback([&] {
        req = {"POST", "/l2sdx/connectors", {{"vxp", vxp_name}, {"name", conn_name}, {"cp", conn_cp}, {"vlan", conn_vlan}}};
    });
    auto* circ_req = l2->add_subcommand("circuit-request", "Request a circuit between two connectors");
    circ_req->add_option("a", circ_a)->required();
    circ_req->add_option("b", circ_b)->required();
    circ_req->callback([&] {
        req = {"POST", "/l2sdx/circuits", {{"a", circ_a}, {"b", circ_b}}, [](std::ostream& o, const json& c) {
                   o << "circuit " << str(c["id"]) << " " << str(c["a"]) << " <-> " << str(c["b"]) << " "
                     << str(c["admin_state"]) << " " << str(c["status"]["status"]) << "\n";
               }};
    });
    auto* circ_rm = l2->add_subcommand("circuit-remove", "Remove a circuit");
    circ_rm->add_option("id", circ_id)->required();
    circ_rm->callback([&] { req = {"DELETE", "/l2sdx/circuits/" + encode_segment(circ_id), {}}; });
    auto* status = l2->add_subcommand("status", "Operational status of a connector or circuit");
    status->add_option("subject", subject, "Connector name or circuit id")->required();
    status->callback([&] {
        req = {"GET", "/l2sdx/status/" + encode_segment(subject), {}, [&](std::ostream& o, const json& s) {
                   o << subject << " " << str(s["status"]);
                   if (!s["detail"].get<std::string>().empty())
                       o << " (" << str(s["detail"]) << ")";
                   o << "\n";
               }};
    });

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Controller cluster mastership");
    cluster->require_subcommand(1);
    cluster->add_subcommand("show", "Show instances and mastership")->callback([&] {
        req = {"GET", "/cluster", {}, render_cluster};
    });
    std::string instance;
    for (const char* verb : {"fail", "recover"}) {
        auto* cmd = cluster->add_subcommand(verb, std::string("Mark an instance ") + (verb[0] == 'f' ? "DEAD" : "ALIVE"));
        cmd->add_option("id", instance)->required();
        std::string path = std::string("/cluster/") + verb + "/";
        cmd->callback([&, path] { req = {"POST", path + encode_segment(instance), {}}; });
    }

    // scenario
    auto* scenario = app.add_subcommand("scenario", "Scenario replay");
    scenario->require_subcommand(1);
    std::string scenario_file;
    auto* run = scenario->add_subcommand("run", "Run a scenario file against a fresh controller");
    run->add_option("file", scenario_file)->required();
    run->callback([&] {
        custom = [&]() -> int {
            auto array = scenario_request(scenario_file);
            req = {"POST", "/scenario", array, render_report};
            return -1;
        };
    });

    // ping
    std::string ping_cp, ping_dst;
    int ping_vlan = 0;
    auto* ping = app.add_subcommand("ping", "Inject a packet and print its trace");
    ping->add_option("src-cp", ping_cp)->required();
    ping->add_option("vlan", ping_vlan)->required();
    ping->add_option("dst-ip", ping_dst);
    ping->callback([&] {
        json header{{"vlan", ping_vlan}};
        if (ping_dst.empty()) {
            header["eth_type"] = "OTHER";
            header["l4_kind"] = "DATA";
        } else {
            header["ip_dst"] = ping_dst;
            header["l4_kind"] = "ICMP";
        }
        req = {"POST", "/traverse", {{"ingress", ping_cp}, {"header", header}}, render_trace};
    });

    // serve
    std::string listen_addr;
    auto* serve_cmd = app.add_subcommand("serve", "Run the controller service");
    serve_cmd->add_option("--listen", listen_addr, "host:port");
    serve_cmd->callback([&] {
        custom = [&]() -> int {
            auto cfg = service_config_from_env();
            if (!listen_addr.empty())
                cfg.set_listen(listen_addr);
            return serve(cfg);
        };
    });

    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--server") {
            ++i;
            continue;
        }
        if (args[i].empty() || args[i][0] == '-')
            continue;
        bool known = false;
        for (const auto* sub : app.get_subcommands({}))
            known = known || sub->get_name() == args[i];
        if (!known) {
            err << "error: unknown verb '" << args[i] << "'\n" << app.help();
            return 2;
        }
        break;
    }

    // CLI11 expects arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (custom)
            if (int rc = custom(); rc >= 0)
                return rc;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    }

    Transport chosen;
    std::unique_ptr<Api> local_api;
    if (transport) {
        chosen = *transport;
    } else if (local) {
        try {
            local_api = make_api(service_config_from_env());
        } catch (const Error& e) {
            err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
            return 1;
        }
        chosen = local_transport(*local_api);
    } else {
        if (server.empty()) {
            const char* env = std::getenv("OXP_SERVER");
            server = env && *env ? env : kDefaultServer;
        }
        chosen = http_transport(server);
    }

    auto reply = chosen(req.method, req.target, req.body.is_null() ? std::string{} : req.body.dump());
    bool ok = reply.status >= 200 && reply.status < 300;
    if (as_json) {
        out << reply.body.dump(2) << "\n";
    } else if (ok) {
        req.render(out, reply.body);
    } else {
        err << "error: " << str(reply.body.value("code", json("ERROR"))) << ": "
            << str(reply.body.value("message", json(""))) << "\n";
    }
    if (!ok)
        return 1;
    if (req.target == "/scenario" && !reply.body.value("passed", false))
        return 1;
    return 0;
}

} // namespace oxp
