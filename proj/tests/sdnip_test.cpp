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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "oxp/controller.hpp"
#include "oxp/error.hpp"
#include "oxp/topology_io.hpp"
#include "test_support.hpp"

using namespace oxp;
using namespace oxp::testing;

namespace {

Peer peer(const std::string& name, const std::string& at, const std::string& ip, VlanId vlan = kDefaultBgpVlan)
{
    Peer p;
    p.name = name;
    p.cp = cp(at);
    p.ip = Ipv4Address::parse(ip);
    p.vlan = vlan;
    return p;
}

Peer speaker()
{
    Peer s = peer("speaker", "AMS/5", "10.0.0.1");
    s.kind = PeerKind::InternalSpeaker;
    return s;
}

std::vector<Peer> demo_peers()
{
    return {peer("peer-lon", "LON/4", "10.0.0.11"), peer("peer-bra", "BRA/4", "10.0.0.12"),
            peer("peer-mil", "MIL/4", "10.0.0.13")};
}

Controller activated()
{
    Controller c(gts7());
    c.sdnip_activate(demo_peers(), speaker());
    return c;
}

Route route(const std::string& peer, const std::string& prefix, std::uint32_t len = 1)
{
    return {Ipv4Prefix::parse(prefix), peer, len};
}

bool bgp_duplex(const Controller& c, const Peer& p, const Peer& s)
{
    auto up = c.traverse(SdnIp::bgp_packet(p, s), p.cp);
    auto down = c.traverse(SdnIp::bgp_packet(s, p), s.cp);
    return up.delivered_at(s.cp) && up.final_header.vlan == s.vlan && down.delivered_at(p.cp) &&
           down.final_header.vlan == p.vlan;
}

SessionState state_of(const std::vector<SessionStatus>& sessions, const std::string& name)
{
    for (const auto& s : sessions)
        if (s.peer == name)
            return s.state;
    ADD_FAILURE() << "no session " << name;
    return SessionState::Idle;
}

} // namespace

TEST(Activate, ThreePeersSixIntents)
{
    Controller c(gts7());
    auto ids = c.sdnip_activate(demo_peers(), speaker());
    EXPECT_EQ(ids.size(), 6u);
    for (auto id : ids) {
        const auto& in = c.intents().get(id);
        EXPECT_EQ(in.state, IntentState::Installed);
        EXPECT_EQ(in.owner, App::Sdnip);
        EXPECT_EQ(in.selector.eth_type, EthType::Ipv4);
        EXPECT_EQ(in.selector.ip_src_prefix->length(), 32);
    }
    for (const auto& p : demo_peers())
        EXPECT_TRUE(bgp_duplex(c, p, speaker())) << p.name;
    for (const auto& s : c.sdnip().sessions())
        EXPECT_EQ(s.state, SessionState::Established);
}

TEST(Activate, ZeroPeers)
{
    Controller c(gts7());
    EXPECT_TRUE(c.sdnip_activate({}, speaker()).empty());
    EXPECT_TRUE(c.sdnip().active());
    EXPECT_EQ(c.flows().size(), 0u);
}

TEST(Activate, DuplicateIpRejectedBeforeInstall)
{
    Controller c(gts7());
    auto peers = demo_peers();
    peers[2].ip = peers[0].ip;
    try {
        c.sdnip_activate(peers, speaker());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Conflict);
    }
    EXPECT_EQ(c.flows().size(), 0u);
    EXPECT_TRUE(c.intents().intents().empty());
    EXPECT_FALSE(c.sdnip().active());

    peers = demo_peers();
    peers[1].name = peers[0].name;
    EXPECT_THROW(c.sdnip_activate(peers, speaker()), Error);
    Peer not_speaker = speaker();
    not_speaker.kind = PeerKind::External;
    EXPECT_THROW(c.sdnip_activate(demo_peers(), not_speaker), Error);
    peers = demo_peers();
    peers[0].cp = cp("LON/1");
    EXPECT_THROW(c.sdnip_activate(peers, speaker()), Error);
    EXPECT_EQ(c.flows().size(), 0u);
}

TEST(Activate, SessionsIdleBeforeActivation)
{
    Controller c(gts7());
    EXPECT_TRUE(c.refresh_sessions().empty());
    EXPECT_THROW(c.announce("peer-lon", route("peer-lon", "10.1.0.0/16")), Error);
}

TEST(AddPeer, PrgLeavesPreexistingRulesUntouched)
{
    auto c = activated();
    c.announce("peer-lon", route("peer-lon", "10.1.0.0/16"));
    c.announce("peer-mil", route("peer-mil", "10.2.0.0/16"));
    Controller before = c;
    auto ids = c.add_peer(peer("peer-prg", "PRG/4", "10.0.0.14"));
    EXPECT_EQ(ids.size(), 2u);
    EXPECT_EQ(flow_keys(before), preexisting_flow_keys(before, c));
    // every old rule survives with its id
    for (const auto& r : before.flows().all())
        EXPECT_NE(c.flows().find(r.id), nullptr);
    EXPECT_EQ(state_of(c.refresh_sessions(), "peer-prg"), SessionState::Established);
    EXPECT_TRUE(c.traverse(ip_packet(10, "9.9.9.9", "10.1.0.1"), cp("PRG/4")).delivered_at(cp("LON/4")));
}

TEST(AddPeer, AddThenRemoveRestoresRuleSet)
{
    auto c = activated();
    c.announce("peer-lon", route("peer-lon", "10.1.0.0/16"));
    auto before = flow_keys(c);
    c.add_peer(peer("peer-prg", "PRG/4", "10.0.0.14"));
    EXPECT_NE(flow_keys(c), before);
    c.remove_peer("peer-prg");
    EXPECT_EQ(flow_keys(c), before);
}

TEST(AddPeer, DisconnectedDeviceFailsOnlyItsIntents)
{
    Topology t = gts7();
    t.add_device(dev("ISL"), 4);
    Controller c(t);
    c.sdnip_activate(demo_peers(), speaker());
    auto before = flow_keys(c);
    auto ids = c.add_peer(peer("peer-isl", "ISL/1", "10.0.0.20"));
    ASSERT_EQ(ids.size(), 2u);
    for (auto id : ids)
        EXPECT_EQ(c.intents().get(id).state, IntentState::Failed);
    EXPECT_EQ(flow_keys(c), before);
    auto sessions = c.refresh_sessions();
    EXPECT_EQ(state_of(sessions, "peer-isl"), SessionState::Idle);
    EXPECT_EQ(state_of(sessions, "peer-lon"), SessionState::Established);
}

TEST(AddPeer, DuplicatesRejected)
{
    auto c = activated();
    EXPECT_THROW(c.add_peer(peer("peer-lon", "PRG/4", "10.0.0.14")), Error);
    EXPECT_THROW(c.add_peer(peer("peer-prg", "PRG/4", "10.0.0.11")), Error);
    Controller fresh(gts7());
    EXPECT_THROW(fresh.add_peer(peer("peer-prg", "PRG/4", "10.0.0.14")), Error);
}

TEST(RemovePeer, CascadesRoutes)
{
    auto c = activated();
    c.announce("peer-lon", route("peer-lon", "10.1.0.0/16"));
    c.announce("peer-lon", route("peer-lon", "10.5.0.0/16", 3));
    c.announce("peer-mil", route("peer-mil", "10.5.0.0/16", 4));
    c.remove_peer("peer-lon");
    EXPECT_EQ(c.sdnip().best_routes().count(Ipv4Prefix::parse("10.1.0.0/16")), 0u);
    EXPECT_EQ(c.sdnip().best_routes().at(Ipv4Prefix::parse("10.5.0.0/16")).origin_peer, "peer-mil");
    EXPECT_EQ(c.sdnip().find_peer("peer-lon"), nullptr);
    EXPECT_THROW(c.remove_peer("peer-lon"), Error);
    EXPECT_THROW(c.remove_peer("speaker"), Error);
    for (const auto& r : c.flows().all())
        EXPECT_EQ(c.intents().get(*r.intent).state, IntentState::Installed);
}

TEST(RemovePeer, WithoutRoutesOnlySessions)
{
    auto c = activated();
    auto n = c.intents().intents().size();
    c.remove_peer("peer-bra");
    std::size_t withdrawn = 0;
    for (const auto& [_, in] : c.intents().intents())
        withdrawn += in.state == IntentState::Withdrawn;
    EXPECT_EQ(withdrawn, 2u);
    EXPECT_EQ(c.intents().intents().size(), n);
}

TEST(Sessions, CutPeerGoesIdleAndLosesRoutes)
{
    Topology t = diamond();
    t.add_device(dev("E"), 8);
    t.add_link(cp("D/3"), cp("E/1"));
    Controller c(t);
    Peer s = peer("speaker", "A/5", "10.0.0.1");
    s.kind = PeerKind::InternalSpeaker;
    c.sdnip_activate({peer("pe", "E/5", "10.0.0.5"), peer("pb", "B/5", "10.0.0.6")}, s);
    c.announce("pe", route("pe", "10.50.0.0/16"));
    c.set_link_state({"D", "E"}, LinkState::Down);
    auto sessions = c.refresh_sessions();
    EXPECT_EQ(state_of(sessions, "pe"), SessionState::Idle);
    EXPECT_EQ(state_of(sessions, "pb"), SessionState::Established);
    EXPECT_TRUE(c.sdnip().routes().empty());
    EXPECT_THROW(c.announce("pe", route("pe", "10.51.0.0/16")), Error);
    c.set_link_state({"D", "E"}, LinkState::Up);
    EXPECT_EQ(state_of(c.refresh_sessions(), "pe"), SessionState::Established);
}

TEST(Announce, BraPrefixDeliveredFromLon)
{
    auto c = activated();
    auto delta = c.announce("peer-bra", route("peer-bra", "10.3.0.0/16"));
    EXPECT_TRUE(delta.rib_changed);
    ASSERT_EQ(delta.submitted.size(), 1u);
    const auto& in = c.intents().get(delta.submitted[0]);
    EXPECT_EQ(in.egress(), cp("BRA/4"));
    EXPECT_FALSE(in.is_p2p());
    auto r = c.traverse(ip_packet(10, "192.0.2.1", "10.3.0.5"), cp("LON/4"));
    EXPECT_TRUE(r.delivered_at(cp("BRA/4")));
    EXPECT_EQ(r.final_header.vlan, VlanId{10});
}

TEST(Announce, RepeatIsNoOp)
{
    auto c = activated();
    c.announce("peer-bra", route("peer-bra", "10.3.0.0/16"));
    auto keys = flow_keys(c);
    auto n = c.intents().intents().size();
    auto delta = c.announce("peer-bra", route("peer-bra", "10.3.0.0/16"));
    EXPECT_FALSE(delta.rib_changed);
    EXPECT_TRUE(delta.submitted.empty() && delta.withdrawn.empty() && delta.updated.empty());
    EXPECT_EQ(flow_keys(c), keys);
    EXPECT_EQ(c.intents().intents().size(), n);
}

TEST(Announce, ShorterPathFlipsEgress)
{
    auto c = activated();
    c.announce("peer-bra", route("peer-bra", "10.3.0.0/16", 3));
    auto delta = c.announce("peer-mil", route("peer-mil", "10.3.0.0/16", 2));
    ASSERT_TRUE(delta.new_best);
    EXPECT_EQ(delta.new_best->origin_peer, "peer-mil");
    EXPECT_EQ(delta.withdrawn.size(), 1u);
    EXPECT_EQ(delta.submitted.size(), 1u);
    EXPECT_EQ(c.intents().get(c.sdnip().transit_intents().at(Ipv4Prefix::parse("10.3.0.0/16"))).egress(),
              cp("MIL/4"));
    EXPECT_TRUE(c.traverse(ip_packet(10, "1.1.1.1", "10.3.3.3"), cp("LON/4")).delivered_at(cp("MIL/4")));
}

TEST(Announce, EqualLengthTieBreaksOnPeerIp)
{
    auto c = activated();
    c.announce("peer-mil", route("peer-mil", "10.7.0.0/16", 2));
    c.announce("peer-lon", route("peer-lon", "10.7.0.0/16", 2));
    EXPECT_EQ(c.sdnip().best_routes().at(Ipv4Prefix::parse("10.7.0.0/16")).origin_peer, "peer-lon");
}

TEST(Withdraw, OnlyRouteRemovesIntent)
{
    auto c = activated();
    auto sessions_only = flow_keys(c);
    auto delta = c.announce("peer-bra", route("peer-bra", "10.3.0.0/16"));
    auto id = delta.submitted.at(0);
    c.withdraw_route("peer-bra", Ipv4Prefix::parse("10.3.0.0/16"));
    EXPECT_EQ(c.intents().get(id).state, IntentState::Withdrawn);
    EXPECT_EQ(flow_keys(c), sessions_only);
    EXPECT_THROW(c.withdraw_route("peer-bra", Ipv4Prefix::parse("10.3.0.0/16")), Error);
}

TEST(Withdraw, NonBestIsNoOpAndBestFlips)
{
    auto c = activated();
    c.announce("peer-bra", route("peer-bra", "10.3.0.0/16", 1));
    c.announce("peer-mil", route("peer-mil", "10.3.0.0/16", 5));
    auto keys = flow_keys(c);
    auto delta = c.withdraw_route("peer-mil", Ipv4Prefix::parse("10.3.0.0/16"));
    EXPECT_TRUE(delta.submitted.empty() && delta.withdrawn.empty());
    EXPECT_EQ(flow_keys(c), keys);

    c.announce("peer-mil", route("peer-mil", "10.3.0.0/16", 5));
    c.withdraw_route("peer-bra", Ipv4Prefix::parse("10.3.0.0/16"));
    EXPECT_EQ(c.sdnip().best_routes().at(Ipv4Prefix::parse("10.3.0.0/16")).origin_peer, "peer-mil");
    EXPECT_TRUE(c.traverse(ip_packet(10, "1.1.1.1", "10.3.3.3"), cp("LON/4")).delivered_at(cp("MIL/4")));
}

TEST(Rib, LongestPrefixWins)
{
    auto c = activated();
    c.announce("peer-mil", route("peer-mil", "10.0.0.0/8"));
    c.announce("peer-bra", route("peer-bra", "10.3.0.0/16"));
    auto a = c.traverse(ip_packet(10, "1.1.1.1", "10.3.1.1"), cp("LON/4"));
    auto b = c.traverse(ip_packet(10, "1.1.1.1", "10.4.1.1"), cp("LON/4"));
    EXPECT_TRUE(a.delivered_at(cp("BRA/4")));
    EXPECT_TRUE(b.delivered_at(cp("MIL/4")));
}

TEST(Rib, PeerVlanOverrideCarriedToEgress)
{
    Controller c(gts7());
    auto peers = demo_peers();
    peers[1].vlan = 77; // BRA uses VLAN 77 for BGP
    c.sdnip_activate(peers, speaker());
    EXPECT_EQ(c.sdnip().reserved_vlan_at(cp("BRA/4")), VlanId{77});
    EXPECT_EQ(c.sdnip().reserved_vlan_at(cp("PRG/6")), kDefaultBgpVlan);
    EXPECT_EQ(state_of(c.refresh_sessions(), "peer-bra"), SessionState::Established);
    c.announce("peer-bra", route("peer-bra", "10.3.0.0/16"));
    auto r = c.traverse(ip_packet(10, "1.1.1.1", "10.3.0.1"), cp("LON/4"));
    EXPECT_TRUE(r.delivered_at(cp("BRA/4")));
    EXPECT_EQ(r.final_header.vlan, VlanId{77});
}

TEST(Rib, SoundnessAndSelectionOracle)
{
    std::mt19937_64 rng(17);
    const std::vector<std::string> names{"peer-lon", "peer-bra", "peer-mil", "peer-prg"};
    const std::vector<std::string> prefixes{"10.1.0.0/16", "10.2.0.0/16", "10.0.0.0/8", "172.16.0.0/12"};
    for (int trial = 0; trial < 25; ++trial) {
        auto c = activated();
        c.add_peer(peer("peer-prg", "PRG/4", "10.0.0.14"));
        std::map<std::string, std::map<std::string, std::uint32_t>> model; // prefix -> peer -> len
        for (int step = 0; step < 30; ++step) {
            auto who = names[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
            auto pfx = prefixes[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
            if (std::uniform_int_distribution<int>(0, 2)(rng) > 0) {
                auto len = static_cast<std::uint32_t>(std::uniform_int_distribution<int>(1, 4)(rng));
                c.announce(who, route(who, pfx, len));
                model[pfx][who] = len;
            } else if (model[pfx].count(who)) {
                c.withdraw_route(who, Ipv4Prefix::parse(pfx));
                model[pfx].erase(who);
            }
        }
        std::map<Ipv4Prefix, std::string> expected;
        for (const auto& [pfx, routes] : model) {
            std::optional<std::tuple<std::uint32_t, std::uint32_t, std::string>> best;
            for (const auto& [who, len] : routes) {
                auto key = std::make_tuple(len, c.sdnip().find_peer(who)->ip.value, who);
                if (!best || key < *best)
                    best = key;
            }
            if (best)
                expected[Ipv4Prefix::parse(pfx)] = std::get<2>(*best);
        }
        ASSERT_EQ(c.sdnip().best_routes().size(), expected.size());
        for (const auto& [pfx, who] : expected) {
            ASSERT_EQ(c.sdnip().best_routes().at(pfx).origin_peer, who);
            const Peer* best = c.sdnip().find_peer(who);
            // the most specific installed prefix covering the probe address decides the egress
            auto probe = pfx.network();
            std::optional<Ipv4Prefix> lpm;
            for (const auto& [other, _] : expected)
                if (other.contains(probe) && (!lpm || other.length() > lpm->length()))
                    lpm = other;
            if (*lpm != pfx)
                continue;
            for (const auto& [name, p] : c.sdnip().peers()) {
                if (name == who)
                    continue;
                auto r = c.traverse(ip_packet(p.vlan, "198.51.100.1", probe.to_string()), p.cp);
                EXPECT_TRUE(r.delivered_at(best->cp)) << pfx.to_string() << " from " << name;
                EXPECT_EQ(r.final_header.vlan, best->vlan);
            }
        }
    }
}

TEST(Rib, InterleavingIndependent)
{
    // Per-peer event order is kept; the merge order across peers varies.
    std::vector<std::vector<std::pair<bool, Route>>> per_peer{
        {{true, route("peer-lon", "10.1.0.0/16", 2)}, {true, route("peer-lon", "10.9.0.0/16", 1)},
         {false, route("peer-lon", "10.1.0.0/16")}},
        {{true, route("peer-bra", "10.1.0.0/16", 1)}, {true, route("peer-bra", "10.9.0.0/16", 3)}},
        {{true, route("peer-mil", "10.9.0.0/16", 1)}, {false, route("peer-mil", "10.9.0.0/16")},
         {true, route("peer-mil", "10.0.0.0/8", 2)}}};
    std::mt19937_64 rng(3);
    std::optional<std::multiset<FlowKey>> reference_flows;
    std::optional<std::map<Ipv4Prefix, Route>> reference_best;
    for (int trial = 0; trial < 40; ++trial) {
        auto c = activated();
        std::vector<std::size_t> next(per_peer.size(), 0);
        std::vector<std::size_t> queue;
        for (std::size_t p = 0; p < per_peer.size(); ++p)
            for (std::size_t k = 0; k < per_peer[p].size(); ++k)
                queue.push_back(p);
        std::shuffle(queue.begin(), queue.end(), rng);
        for (auto p : queue) {
            const auto& [announce, r] = per_peer[p][next[p]++];
            if (announce)
                c.announce(r.origin_peer, r);
            else
                c.withdraw_route(r.origin_peer, r.prefix);
        }
        if (!reference_flows) {
            reference_flows = flow_keys(c);
            reference_best = c.sdnip().best_routes();
        }
        EXPECT_EQ(flow_keys(c), *reference_flows);
        EXPECT_EQ(c.sdnip().best_routes(), *reference_best);
    }
}
