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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oxp/intent.hpp"

namespace oxp {

/// Default VLAN reserved for BGP traffic at every client interface.
constexpr VlanId kDefaultBgpVlan = 10;

enum class PeerKind { External, InternalSpeaker };
std::string_view to_string(PeerKind k);

struct Peer {
    std::string name;
    ConnectPoint cp;
    VlanId vlan = kDefaultBgpVlan;
    Ipv4Address ip;
    std::uint32_t asn = 0;
    PeerKind kind = PeerKind::External;

    bool operator==(const Peer&) const = default;
};

struct Route {
    Ipv4Prefix prefix;
    std::string origin_peer;
    std::uint32_t as_path_len = 0;

    bool operator==(const Route&) const = default;
};

enum class SessionState { Idle, Established };
std::string_view to_string(SessionState s);

struct SessionStatus {
    std::string peer;
    SessionState state = SessionState::Idle;

    bool operator==(const SessionStatus&) const = default;
};

/// What an announcement or withdrawal did to the RIB and the transit intents.
struct RibDelta {
    Ipv4Prefix prefix;
    bool rib_changed = false;
    std::optional<Route> old_best;
    std::optional<Route> new_best;
    std::vector<IntentId> submitted;
    std::vector<IntentId> withdrawn;
    std::vector<IntentId> updated;
};

/// Best route selection: lowest AS path length, then lowest origin peer IP.
/// `peer_ip` resolves a peer name to its address.
template <typename PeerIpFn>
const Route* select_best(const std::map<std::string, Route>& candidates, PeerIpFn&& peer_ip)
{
    const Route* best = nullptr;
    for (const auto& [peer, route] : candidates) {
        if (!best || route.as_path_len < best->as_path_len ||
            (route.as_path_len == best->as_path_len && peer_ip(route.origin_peer) < peer_ip(best->origin_peer)))
            best = &route;
    }
    return best;
}

/// BGP peering and route-to-flow translation.
class SdnIp {
public:
    /// Installs duplex BGP session intents between every external peer and
    /// the speaker. All validation happens before the first submission.
    std::vector<IntentId> activate(const std::vector<Peer>& peers, const Peer& speaker, IntentService& intents,
                                   Network& net);

    /// Adds one external peer. Existing session and transit rules are left
    /// untouched; transit intents gain the new peer as an ingress.
    std::vector<IntentId> add_peer(const Peer& peer, IntentService& intents, Network& net);

    void remove_peer(const std::string& name, IntentService& intents, Network& net);

    /// A peer is ESTABLISHED iff BGP control packets cross the fabric in both
    /// directions. Peers that drop to IDLE lose their routes.
    std::vector<SessionStatus> refresh_sessions(IntentService& intents, Network& net);

    RibDelta process_announcement(const std::string& peer, Route route, IntentService& intents, Network& net);
    RibDelta process_withdrawal(const std::string& peer, const Ipv4Prefix& prefix, IntentService& intents,
                                Network& net);

    bool active() const { return speaker_.has_value(); }
    const std::optional<Peer>& speaker() const { return speaker_; }
    const std::map<std::string, Peer>& peers() const { return peers_; }
    const Peer* find_peer(const std::string& name) const;
    std::vector<SessionStatus> sessions() const;
    const std::map<Ipv4Prefix, std::map<std::string, Route>>& routes() const { return routes_; }
    const std::map<Ipv4Prefix, Route>& best_routes() const { return best_; }
    const std::map<Ipv4Prefix, IntentId>& transit_intents() const { return transit_; }
    const std::map<std::string, std::vector<IntentId>>& session_intents() const { return session_intents_; }

    /// BGP VLAN reserved at a client interface: the VLAN of a peer (or the
    /// speaker) attached there, otherwise kDefaultBgpVlan.
    VlanId reserved_vlan_at(const ConnectPoint& cp) const;

    /// BGP control packet from `from` addressed to `to`, tagged with from's VLAN.
    static PacketHeader bgp_packet(const Peer& from, const Peer& to);

    bool operator==(const SdnIp&) const = default;

private:
    void validate_peer(const Peer& peer, const Topology& topo) const;
    std::vector<IntentId> install_sessions(const Peer& peer, IntentService& intents, Network& net);
    /// Brings the transit intent of a prefix in line with the RIB.
    void sync_transit(const Ipv4Prefix& prefix, RibDelta& delta, IntentService& intents, Network& net);
    Ipv4Address peer_ip(const std::string& name) const;

    std::optional<Peer> speaker_;
    std::map<std::string, Peer> peers_;
    std::map<std::string, SessionState> sessions_;
    std::map<std::string, std::vector<IntentId>> session_intents_;
    std::map<Ipv4Prefix, std::map<std::string, Route>> routes_;
    std::map<Ipv4Prefix, Route> best_;
    std::map<Ipv4Prefix, IntentId> transit_;
};

} // namespace oxp
