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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oxp/controller.hpp"
#include "oxp/error.hpp"
#include "oxp/json_codec.hpp"
#include "oxp/scenario.hpp"
#include "oxp/topology_io.hpp"
#include "../test_support.hpp"

using namespace oxp;
using namespace oxp::testing;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Peer make_peer(const std::string& name, const std::string& at, const std::string& ip,
               PeerKind kind = PeerKind::External)
{
    Peer p;
    p.name = name;
    p.cp = cp(at);
    p.ip = Ipv4Address::parse(ip);
    p.kind = kind;
    return p;
}

// --- demo replay -----------------------------------------------------------

Verdict demo_replay()
{
    auto t0 = Clock::now();
    Controller c;
    auto report = run_scenario_file(std::filesystem::path(OXP_SOURCE_DIR) / "scenarios" / "demo-ons2016.json", c);
    double wall = seconds_since(t0);
    std::size_t asserts = 0, assert_ok = 0;
    std::string first_failure;
    for (const auto& s : report.steps) {
        if (s.action == "ASSERT") {
            ++asserts;
            assert_ok += s.ok;
        }
        if (!s.ok && first_failure.empty())
            first_failure = "; step " + std::to_string(s.index) + " " + s.detail;
    }
    std::ostringstream d;
    d << report.ok << "/" << report.steps.size() << " steps OK, " << assert_ok << "/" << asserts
      << " ASSERT OK, wall " << wall << " s (limit 5 s)" << first_failure;
    return {report.passed() && asserts > 0 && wall < 5.0, d.str()};
}

// --- non-impact of peer addition ---------------------------------------------

Verdict non_impact()
{
    std::mt19937_64 rng(7);
    const std::vector<std::string> origin{"peer-lon", "peer-bra", "peer-mil"};
    std::size_t trials = 0, mismatches = 0, rules_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Controller before(gts7());
        before.sdnip_activate({make_peer("peer-lon", "LON/4", "10.0.0.11"), make_peer("peer-bra", "BRA/4", "10.0.0.12"),
                               make_peer("peer-mil", "MIL/4", "10.0.0.13")},
                              make_peer("speaker-ams", "AMS/5", "10.0.0.1", PeerKind::InternalSpeaker));
        int routes = std::uniform_int_distribution<int>(0, 8)(rng);
        for (int k = 0; k < routes; ++k) {
            auto who = origin[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
            int b = std::uniform_int_distribution<int>(0, 9)(rng);
            int len = std::uniform_int_distribution<int>(0, 2)(rng) == 0 ? 8 : 16;
            auto prefix = len == 8 ? "10.0.0.0/8" : "10." + std::to_string(b) + ".0.0/16";
            before.announce(who, {Ipv4Prefix::parse(prefix), who, static_cast<std::uint32_t>(
                                                                       std::uniform_int_distribution<int>(1, 4)(rng))});
        }
        if (trial % 2) {
            before.create_vxp("v");
            before.add_connector("v", "a", cp("AMS/6"), 400);
            before.add_connector("v", "b", cp("MIL/5"), 500);
            before.request_circuit("a", "b");
        }
        Controller after = before;
        after.add_peer(make_peer("peer-prg", "PRG/4", "10.0.0.14"));
        auto expected = flow_keys(before);
        rules_checked += expected.size();
        if (expected != preexisting_flow_keys(before, after))
            ++mismatches;
        ++trials;
    }
    std::ostringstream d;
    d << trials << " add_peer trials, " << rules_checked << " preexisting rules compared, " << mismatches
      << " mismatching trials (tolerance 0)";
    return {mismatches == 0, d.str()};
}

// --- isolation rules -----------------------------------------------------------

Verdict isolation_rules()
{
    std::mt19937_64 rng(11);
    Controller c(gts7());
    const int vxps = 3;
    for (int v = 0; v < vxps; ++v)
        c.create_vxp("v" + std::to_string(v));
    auto ports = c.topology().edge_ports();
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::size_t ops = 0, violations = 0, cross_attempts = 0, cross_rejected = 0, dup_attempts = 0,
                dup_rejected = 0, busy_attempts = 0, busy_rejected = 0;
    int counter = 0;
    auto check_state = [&] {
        std::map<std::pair<ConnectPoint, VlanId>, int> pairs;
        for (const auto& [_, con] : c.l2sdx().connectors())
            if (++pairs[{con.cp, con.vlan}] > 1)
                ++violations;
        std::map<std::string, int> uses;
        for (const auto& [_, circuit] : c.l2sdx().circuits()) {
            if (circuit.admin_state == CircuitState::Removed)
                continue;
            if (++uses[circuit.a] > 1 || ++uses[circuit.b] > 1)
                ++violations;
            if (c.l2sdx().connector(circuit.a).vxp != c.l2sdx().connector(circuit.b).vxp)
                ++violations;
        }
    };
    while (ops < 10000) {
        int kind = static_cast<int>(pick(10));
        if (kind < 4) {
            auto p = ports[pick(ports.size())];
            auto vlan = static_cast<VlanId>(100 + pick(6));
            bool dup = c.l2sdx().connector_at(p, vlan) != nullptr;
            dup_attempts += dup;
            try {
                c.add_connector("v" + std::to_string(pick(vxps)), "k" + std::to_string(counter++), p, vlan);
            } catch (const Error& e) {
                dup_rejected += dup && e.code() == ErrorCode::Conflict;
            }
        } else if (kind < 7 && c.l2sdx().connectors().size() >= 2) {
            auto it_a = c.l2sdx().connectors().begin();
            auto it_b = c.l2sdx().connectors().begin();
            std::advance(it_a, pick(c.l2sdx().connectors().size()));
            std::advance(it_b, pick(c.l2sdx().connectors().size()));
            bool cross = it_a->second.vxp != it_b->second.vxp;
            bool busy = !cross && it_a->first != it_b->first && it_a->second.cp != it_b->second.cp &&
                        (c.l2sdx().circuit_of(it_a->first) || c.l2sdx().circuit_of(it_b->first));
            cross_attempts += cross;
            busy_attempts += busy;
            try {
                c.request_circuit(it_a->first, it_b->first);
            } catch (const Error& e) {
                cross_rejected += cross && e.code() == ErrorCode::Isolation;
                busy_rejected += busy && e.code() == ErrorCode::Conflict;
            }
        } else if (kind < 9) {
            std::vector<CircuitId> live;
            for (const auto& [id, circuit] : c.l2sdx().circuits())
                if (circuit.admin_state != CircuitState::Removed)
                    live.push_back(id);
            if (live.empty())
                continue;
            c.remove_circuit(live[pick(live.size())]);
        } else {
            if (c.l2sdx().connectors().empty())
                continue;
            auto it = c.l2sdx().connectors().begin();
            std::advance(it, pick(c.l2sdx().connectors().size()));
            try {
                c.remove_connector(it->first);
            } catch (const Error&) {
            }
        }
        ++ops;
        check_state();
    }
    bool all_rejected =
        cross_rejected == cross_attempts && dup_rejected == dup_attempts && busy_rejected == busy_attempts;
    std::ostringstream d;
    d << ops << " operations, " << violations << " violations; rejected " << dup_rejected << "/" << dup_attempts
      << " duplicate (cp, vlan), " << busy_rejected << "/" << busy_attempts << " busy connector, " << cross_rejected
      << "/" << cross_attempts << " cross-VXP";
    return {violations == 0 && all_rejected && ops >= 10000, d.str()};
}

// --- traffic isolation ---------------------------------------------------------

Verdict traffic_isolation()
{
    std::mt19937_64 rng(13);
    std::size_t configs = 0, probes = 0, leaks = 0, max_devices = 0, max_circuits = 0;
    std::string example;
    for (int trial = 0; trial < 400; ++trial) {
        auto c = random_l2_config(rng, 8, 6, 1 + trial % 3);
        std::size_t live = 0;
        for (const auto& [_, circuit] : c.l2sdx().circuits())
            live += circuit.admin_state != CircuitState::Removed;
        std::set<VlanId> vlans;
        for (const auto& [_, con] : c.l2sdx().connectors())
            vlans.insert(con.vlan);
        probes += c.topology().edge_ports().size() * vlans.size();
        auto found = traffic_leaks(c);
        leaks += found.size();
        if (!found.empty() && example.empty())
            example = "; e.g. " + found.front();
        max_devices = std::max(max_devices, c.topology().devices().size());
        max_circuits = std::max(max_circuits, live);
        ++configs;
    }
    std::ostringstream d;
    d << configs << " configurations (up to " << max_devices << " devices, " << max_circuits << " circuits), "
      << probes << " (edge cp, vlan) probes, " << leaks << " leaks" << example;
    return {leaks == 0 && max_devices <= 8 && max_circuits <= 6, d.str()};
}

// --- reroute ---------------------------------------------------------------------

Verdict reroute()
{
    std::mt19937_64 rng(17);
    std::size_t trials = 0, circuits_checked = 0, rerouted = 0, disconnected = 0, errors = 0;
    std::string example;
    while (trials < 1000) {
        auto c = random_l2_config(rng, 8, 6, 1);
        std::vector<CircuitId> active;
        for (const auto& [id, circuit] : c.l2sdx().circuits())
            if (circuit.admin_state == CircuitState::Active)
                active.push_back(id);
        const auto& links = c.topology().links();
        if (active.empty() || links.empty())
            continue;
        const auto& link = links[std::uniform_int_distribution<std::size_t>(0, links.size() - 1)(rng)];
        c.set_link_state({link.a.to_string(), link.b.to_string()}, LinkState::Down);
        ++trials;
        for (auto id : active) {
            const auto& circuit = c.l2sdx().circuit(id);
            const auto& a = c.l2sdx().connector(circuit.a);
            const auto& b = c.l2sdx().connector(circuit.b);
            ++circuits_checked;
            bool ok;
            if (reachable(c.topology(), a.cp.device, b.cp.device)) {
                auto ab = c.traverse(l2_frame(a.vlan), a.cp);
                auto ba = c.traverse(l2_frame(b.vlan), b.cp);
                ok = ab.delivered_at(b.cp) && ab.final_header.vlan == b.vlan && ba.delivered_at(a.cp) &&
                     ba.final_header.vlan == a.vlan;
                rerouted += ok;
            } else {
                std::size_t residual = 0;
                for (const auto& r : c.flows().all())
                    residual += r.intent == circuit.intents.first || r.intent == circuit.intents.second;
                ok = c.intents().get(circuit.intents.first).state == IntentState::Failed &&
                     c.intents().get(circuit.intents.second).state == IntentState::Failed && residual == 0;
                disconnected += ok;
            }
            if (!ok) {
                ++errors;
                if (example.empty())
                    example = "; e.g. circuit " + std::to_string(id) + " after " + link.a.to_string() + "-" +
                              link.b.to_string() + " down";
            }
        }
    }
    std::ostringstream d;
    d << trials << " single-link failures, " << circuits_checked << " circuits: " << rerouted
      << " DELIVERED after reroute, " << disconnected << " disconnected and FAILED with 0 residual rules, " << errors
      << " errors" << example;
    return {errors == 0 && trials >= 1000, d.str()};
}

// --- longest-prefix transit ---------------------------------------------------

Verdict longest_prefix()
{
    Controller c(gts7());
    c.sdnip_activate({make_peer("peer-lon", "LON/4", "10.0.0.11"), make_peer("peer-bra", "BRA/4", "10.0.0.12"),
                      make_peer("peer-mil", "MIL/4", "10.0.0.13"), make_peer("peer-prg", "PRG/4", "10.0.0.14")},
                     make_peer("speaker-ams", "AMS/5", "10.0.0.1", PeerKind::InternalSpeaker));
    const auto wide = Ipv4Prefix::parse("10.0.0.0/8");
    const auto narrow = Ipv4Prefix::parse("10.3.0.0/16");
    c.announce("peer-mil", {wide, "peer-mil", 1});
    c.announce("peer-bra", {narrow, "peer-bra", 1});

    std::size_t priority_errors = 0;
    for (const auto& r : c.flows().all()) {
        if (!r.match.ip_dst_prefix || r.match.ip_dst_prefix->length() == 32)
            continue;
        if (r.priority != kTransitBasePriority + r.match.ip_dst_prefix->length())
            ++priority_errors;
    }

    std::mt19937_64 rng(19);
    std::size_t addresses = 0, misroutes = 0, inside_narrow = 0;
    std::string example;
    for (int i = 0; i < 100; ++i) {
        std::uint32_t host = static_cast<std::uint32_t>(rng());
        Ipv4Address dst;
        if (i % 2 == 0)
            dst.value = (narrow.network().value & 0xffff0000u) | (host & 0xffffu);
        else
            dst.value = (wide.network().value & 0xff000000u) | (host & 0x00ffffffu);
        // oracle: most specific covering prefix
        bool in_narrow = ((dst.value ^ narrow.network().value) & 0xffff0000u) == 0;
        inside_narrow += in_narrow;
        ConnectPoint expect = in_narrow ? cp("BRA/4") : cp("MIL/4");
        ++addresses;
        for (const char* ingress : {"LON/4", "PRG/4"}) {
            auto r = c.traverse(ip_packet(kDefaultBgpVlan, "198.51.100.7", dst.to_string()), cp(ingress));
            if (!r.delivered_at(expect) || r.final_header.vlan != kDefaultBgpVlan) {
                ++misroutes;
                if (example.empty())
                    example = "; e.g. " + dst.to_string() + " from " + ingress;
            }
        }
    }
    std::ostringstream d;
    d << addresses << " destinations (" << inside_narrow << " inside the /16) from 2 ingresses, " << misroutes
      << " misroutes, " << priority_errors << " transit rules with priority != base + prefix length" << example;
    return {misroutes == 0 && priority_errors == 0 && addresses == 100, d.str()};
}

// --- oracle equivalence -----------------------------------------------------------

Verdict oracle_equivalence()
{
    std::size_t graphs = 0, pairs = 0, path_mismatches = 0;
    auto compare_all_pairs = [&](const Topology& t) {
        for (const auto& [src, _] : t.devices())
            for (const auto& [dst, __] : t.devices()) {
                ++pairs;
                if (t.shortest_path(src, dst) != brute_force_path(t, src, dst))
                    ++path_mismatches;
            }
    };
    for (int n = 1; n <= 6; ++n) {
        std::vector<std::pair<int, int>> all;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                all.emplace_back(a, b);
        for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
            std::vector<std::pair<int, int>> edges;
            for (std::size_t k = 0; k < all.size(); ++k)
                if (mask & (1u << k))
                    edges.push_back(all[k]);
            if (!connected(n, edges))
                continue;
            ++graphs;
            compare_all_pairs(graph_topology(n, edges, 8));
        }
    }
    std::size_t small_graphs = graphs;
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        int n = 7 + k % 2;
        auto t = graph_topology(n, random_connected_edges(rng, n, std::uniform_int_distribution<int>(0, 10)(rng)), 12);
        // a few DOWN links exercise the usable-link filter
        if (k % 3 == 0 && !t.links().empty()) {
            const auto& l = t.links()[std::uniform_int_distribution<std::size_t>(0, t.links().size() - 1)(rng)];
            t.set_link_state({l.a.to_string(), l.b.to_string()}, LinkState::Down);
        }
        ++graphs;
        compare_all_pairs(t);
    }

    // match_packet against the brute-force scan
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const char* prefixes[] = {"0.0.0.0/0", "10.0.0.0/8", "10.1.0.0/16", "10.1.2.0/24", "10.1.2.3/32", "192.168.0.0/16"};
    const char* addrs[] = {"10.1.2.3", "10.1.9.9", "10.200.0.1", "192.168.4.4", "8.8.8.8"};
    Topology one;
    one.add_device(DeviceId("D"), 6);
    std::size_t tables = 0, lookups = 0, lookup_mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Network net{one, {}};
        int n = pick(0, 16);
        for (int i = 0; i < n; ++i) {
            FlowRule r;
            r.device = DeviceId("D");
            r.priority = static_cast<std::uint16_t>(pick(1, 4));
            if (pick(0, 1))
                r.match.in_port = static_cast<PortNumber>(pick(1, 3));
            if (pick(0, 1))
                r.match.vlan = static_cast<VlanId>(pick(10, 12));
            if (pick(0, 2) == 0) {
                r.match.eth_type = EthType::Ipv4;
                if (pick(0, 1))
                    r.match.ip_dst_prefix = Ipv4Prefix::parse(prefixes[pick(0, 5)]);
                if (pick(0, 2) == 0)
                    r.match.ip_src_prefix = Ipv4Prefix::parse(prefixes[pick(0, 5)]);
            } else if (pick(0, 3) == 0) {
                r.match.eth_type = EthType::Other;
            }
            r.actions = {Output{static_cast<PortNumber>(pick(1, 6))}};
            try {
                net.flows.install(r, one);
            } catch (const Error&) {
                // identical (priority, match) already present
            }
        }
        ++tables;
        auto rules = net.flows.all();
        for (int q = 0; q < 25; ++q) {
            std::optional<VlanId> vlan;
            if (pick(0, 2))
                vlan = static_cast<VlanId>(pick(10, 12));
            PacketHeader h = pick(0, 1) ? ip_packet(vlan, addrs[pick(0, 4)], addrs[pick(0, 4)]) : l2_frame(vlan);
            auto port = static_cast<PortNumber>(pick(1, 3));
            const FlowRule* got = match_packet(net, DeviceId("D"), port, h);
            auto want = reference_lookup(rules, DeviceId("D"), port, h);
            ++lookups;
            if ((got ? std::optional<RuleId>(got->id) : std::nullopt) != want)
                ++lookup_mismatches;
        }
    }
    std::ostringstream d;
    d << "shortest_path: " << small_graphs << " connected graphs with <= 6 devices + " << graphs - small_graphs
      << " random graphs with 7-8 devices, " << pairs << " pairs, " << path_mismatches << " mismatches; match_packet: "
      << tables << " random tables, " << lookups << " lookups, " << lookup_mismatches << " mismatches";
    return {path_mismatches == 0 && lookup_mismatches == 0 && tables >= 1000, d.str()};
}

// --- failover -------------------------------------------------------------------

Verdict failover()
{
    const std::vector<std::string> instances{"AMS-1", "BRA-1", "MIL-1"};
    auto base = loaded_gts7(gts7());
    base.init_cluster(instances);
    const auto base_digest = summary_digest(base);
    const auto base_probes = probe_all(base);
    std::size_t sequences = 0, events = 0, orphan = 0, state_changes = 0;
    for (int len = 0; len <= 4; ++len) {
        int total = 1;
        for (int k = 0; k < len; ++k)
            total *= 3;
        for (int word = 0; word < total; ++word) {
            Controller c = base;
            std::set<std::string> dead;
            int w = word;
            for (int k = 0; k < len; ++k, w /= 3) {
                const auto& id = instances[w % 3];
                if (dead.count(id)) {
                    c.recover_instance(id);
                    dead.erase(id);
                } else {
                    c.fail_instance(id);
                    dead.insert(id);
                }
                ++events;
                if (dead.size() < instances.size())
                    for (const auto& [device, master] : c.cluster().masters())
                        if (!master || c.cluster().instances().at(*master) != InstanceState::Alive)
                            ++orphan;
                if (!c.same_service_state(base) || summary_digest(c) != base_digest)
                    ++state_changes;
            }
            if (probe_all(c) != base_probes)
                ++state_changes;
            ++sequences;
        }
    }
    std::ostringstream d;
    d << sequences << " fail/recover sequences (length <= 4, 3 instances, 7 devices), " << events
      << " mastership events, " << orphan << " devices without an ALIVE master, " << state_changes
      << " service state changes";
    return {orphan == 0 && state_changes == 0, d.str()};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"demo replay", demo_replay},
        {"non-impact of peer addition", non_impact},
        {"isolation rules", isolation_rules},
        {"traffic isolation", traffic_isolation},
        {"reroute", reroute},
        {"longest-prefix transit", longest_prefix},
        {"oracle equivalence", oracle_equivalence},
        {"failover", failover},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        auto t0 = Clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%s %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
