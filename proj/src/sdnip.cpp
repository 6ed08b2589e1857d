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

#include "oxp/sdnip.hpp"

#include <algorithm>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(PeerKind k) { return k == PeerKind::External ? "EXTERNAL" : "INTERNAL_SPEAKER"; }
std::string_view to_string(SessionState s) { return s == SessionState::Idle ? "IDLE" : "ESTABLISHED"; }

PacketHeader SdnIp::bgp_packet(const Peer& from, const Peer& to)
{
    PacketHeader h;
    h.vlan = from.vlan;
    h.eth_type = EthType::Ipv4;
    h.ip_src = from.ip;
    h.ip_dst = to.ip;
    h.l4_kind = L4Kind::BgpCtrl;
    return h;
}

const Peer* SdnIp::find_peer(const std::string& name) const
{
    auto it = peers_.find(name);
    return it == peers_.end() ? nullptr : &it->second;
}

std::vector<SessionStatus> SdnIp::sessions() const
{
    std::vector<SessionStatus> out;
    for (const auto& [name, state] : sessions_)
        out.push_back({name, state});
    return out;
}

VlanId SdnIp::reserved_vlan_at(const ConnectPoint& cp) const
{
    if (speaker_ && speaker_->cp == cp)
        return speaker_->vlan;
    for (const auto& [name, p] : peers_)
        if (p.cp == cp)
            return p.vlan;
    return kDefaultBgpVlan;
}

Ipv4Address SdnIp::peer_ip(const std::string& name) const
{
    return peers_.at(name).ip;
}

void SdnIp::validate_peer(const Peer& peer, const Topology& topo) const
{
    if (peer.name.empty())
        throw Error(ErrorCode::Validation, "peer name must be non-empty");
    if (!is_valid_vlan(peer.vlan))
        throw Error(ErrorCode::Validation, "peer " + peer.name + " VLAN out of range", peer.name);
    if (!topo.is_edge_port(peer.cp))
        throw Error(ErrorCode::Validation, "peer " + peer.name + " is not attached to an edge port",
                    peer.cp.to_string());
}

namespace {

void check_unique(const std::vector<const Peer*>& all)
{
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const auto& a = *all[i];
            const auto& b = *all[j];
            if (a.name == b.name)
                throw Error(ErrorCode::Conflict, "duplicate peer name " + a.name, a.name);
            if (a.ip == b.ip)
                throw Error(ErrorCode::Conflict, "peers " + a.name + " and " + b.name + " share IP " +
                            a.ip.to_string(), b.name);
            if (a.cp == b.cp && a.vlan != b.vlan)
                throw Error(ErrorCode::Conflict, "peers " + a.name + " and " + b.name +
                            " disagree on the BGP VLAN of " + a.cp.to_string(), b.name);
        }
}

} // namespace

std::vector<IntentId> SdnIp::activate(const std::vector<Peer>& peers, const Peer& speaker, IntentService& intents,
                                      Network& net)
{
    if (active())
        throw Error(ErrorCode::Conflict, "SDN-IP is already activated");
    if (speaker.kind != PeerKind::InternalSpeaker)
        throw Error(ErrorCode::Validation, "speaker must be INTERNAL_SPEAKER", speaker.name);
    validate_peer(speaker, net.topology);
    std::vector<const Peer*> all{&speaker};
    for (const auto& p : peers) {
        if (p.kind != PeerKind::External)
            throw Error(ErrorCode::Validation, "exactly one INTERNAL_SPEAKER is allowed", p.name);
        validate_peer(p, net.topology);
        if (p.cp == speaker.cp)
            throw Error(ErrorCode::Validation, "peer " + p.name + " shares the speaker's port", p.name);
        all.push_back(&p);
    }
    check_unique(all);

    speaker_ = speaker;
    std::vector<IntentId> ids;
    for (const auto& p : peers) {
        peers_[p.name] = p;
        sessions_[p.name] = SessionState::Idle;
        auto pair = install_sessions(p, intents, net);
        ids.insert(ids.end(), pair.begin(), pair.end());
    }
    return ids;
}

std::vector<IntentId> SdnIp::install_sessions(const Peer& peer, IntentService& intents, Network& net)
{
    auto session_intent = [&](const Peer& from, const Peer& to) {
        Intent in;
        in.endpoints = PointToPoint{from.cp, to.cp};
        in.selector.vlan = from.vlan;
        in.selector.eth_type = EthType::Ipv4;
        in.selector.ip_src_prefix = Ipv4Prefix::host(from.ip);
        in.selector.ip_dst_prefix = Ipv4Prefix::host(to.ip);
        in.treatment.set_vlan = to.vlan;
        in.owner = App::Sdnip;
        return intents.submit(std::move(in), net);
    };
    std::vector<IntentId> ids{session_intent(peer, *speaker_), session_intent(*speaker_, peer)};
    session_intents_[peer.name] = ids;
    return ids;
}

std::vector<IntentId> SdnIp::add_peer(const Peer& peer, IntentService& intents, Network& net)
{
    if (!active())
        throw Error(ErrorCode::Validation, "SDN-IP is not activated");
    if (peer.kind != PeerKind::External)
        throw Error(ErrorCode::Validation, "only external peers can be added", peer.name);
    validate_peer(peer, net.topology);
    if (peer.cp == speaker_->cp)
        throw Error(ErrorCode::Validation, "peer " + peer.name + " shares the speaker's port", peer.name);
    std::vector<const Peer*> all{&*speaker_};
    for (const auto& [name, p] : peers_)
        all.push_back(&p);
    all.push_back(&peer);
    check_unique(all);

    peers_[peer.name] = peer;
    sessions_[peer.name] = SessionState::Idle;
    auto ids = install_sessions(peer, intents, net);
    std::vector<Ipv4Prefix> prefixes;
    for (const auto& [prefix, _] : best_)
        prefixes.push_back(prefix);
    for (const auto& prefix : prefixes) {
        RibDelta delta;
        sync_transit(prefix, delta, intents, net);
    }
    return ids;
}

void SdnIp::remove_peer(const std::string& name, IntentService& intents, Network& net)
{
    if (speaker_ && speaker_->name == name)
        throw Error(ErrorCode::Validation, "the internal speaker cannot be removed", name);
    if (!peers_.contains(name))
        throw Error(ErrorCode::NotFound, "unknown peer " + name, name);

    for (auto& [prefix, candidates] : routes_)
        candidates.erase(name);
    for (IntentId id : session_intents_[name])
        if (const auto* in = intents.find(id); in && in->state != IntentState::Withdrawn)
            intents.withdraw(id, net);
    session_intents_.erase(name);
    sessions_.erase(name);
    peers_.erase(name);

    std::set<Ipv4Prefix> prefixes;
    for (const auto& [prefix, _] : routes_)
        prefixes.insert(prefix);
    for (const auto& [prefix, _] : transit_)
        prefixes.insert(prefix);
    for (const auto& prefix : prefixes) {
        RibDelta delta;
        sync_transit(prefix, delta, intents, net);
    }
}

std::vector<SessionStatus> SdnIp::refresh_sessions(IntentService& intents, Network& net)
{
    if (!active())
        return sessions();
    std::vector<std::string> dropped;
    for (auto& [name, state] : sessions_) {
        const Peer& p = peers_.at(name);
        auto fwd = traverse(net, bgp_packet(p, *speaker_), p.cp);
        auto rev = traverse(net, bgp_packet(*speaker_, p), speaker_->cp);
        bool up = fwd.delivered_at(speaker_->cp) && fwd.final_header.vlan == speaker_->vlan &&
                  rev.delivered_at(p.cp) && rev.final_header.vlan == p.vlan;
        auto next = up ? SessionState::Established : SessionState::Idle;
        if (state == SessionState::Established && next == SessionState::Idle)
            dropped.push_back(name);
        state = next;
    }
    for (const auto& name : dropped) {
        std::vector<Ipv4Prefix> prefixes;
        for (auto& [prefix, candidates] : routes_)
            if (candidates.erase(name))
                prefixes.push_back(prefix);
        for (const auto& prefix : prefixes) {
            RibDelta delta;
            sync_transit(prefix, delta, intents, net);
        }
    }
    return sessions();
}

RibDelta SdnIp::process_announcement(const std::string& peer, Route route, IntentService& intents, Network& net)
{
    const Peer* p = find_peer(peer);
    if (!p)
        throw Error(ErrorCode::NotFound, "unknown peer " + peer, peer);
    if (sessions_.at(peer) != SessionState::Established)
        throw Error(ErrorCode::Validation, "BGP session with " + peer + " is not ESTABLISHED", peer);
    route.origin_peer = peer;

    RibDelta delta;
    delta.prefix = route.prefix;
    auto& candidates = routes_[route.prefix];
    if (auto it = candidates.find(peer); it != candidates.end() && it->second == route) {
        if (auto b = best_.find(route.prefix); b != best_.end())
            delta.old_best = delta.new_best = b->second;
        return delta;
    }
    candidates[peer] = route;
    delta.rib_changed = true;
    sync_transit(route.prefix, delta, intents, net);
    return delta;
}

RibDelta SdnIp::process_withdrawal(const std::string& peer, const Ipv4Prefix& prefix, IntentService& intents,
                                   Network& net)
{
    if (!find_peer(peer))
        throw Error(ErrorCode::NotFound, "unknown peer " + peer, peer);
    auto it = routes_.find(prefix);
    if (it == routes_.end() || !it->second.erase(peer))
        throw Error(ErrorCode::NotFound, "peer " + peer + " has no announcement for " + prefix.to_string(),
                    prefix.to_string());
    RibDelta delta;
    delta.prefix = prefix;
    delta.rib_changed = true;
    sync_transit(prefix, delta, intents, net);
    return delta;
}

void SdnIp::sync_transit(const Ipv4Prefix& prefix, RibDelta& delta, IntentService& intents, Network& net)
{
    delta.prefix = prefix;
    if (auto b = best_.find(prefix); b != best_.end())
        delta.old_best = b->second;

    const Route* best = nullptr;
    if (auto r = routes_.find(prefix); r != routes_.end()) {
        if (r->second.empty())
            routes_.erase(r);
        else
            best = select_best(r->second, [this](const std::string& n) { return peer_ip(n); });
    }
    if (best) {
        best_[prefix] = *best;
        delta.new_best = *best;
    } else {
        best_.erase(prefix);
    }

    // Desired transit intent: every other external peer toward the best peer.
    std::optional<Intent> desired;
    if (best) {
        const Peer& egress = peers_.at(best->origin_peer);
        MultiPointToSinglePoint ends{{}, egress.cp};
        for (const auto& [name, p] : peers_)
            if (name != egress.name && p.cp != egress.cp)
                ends.ingresses.insert(p.cp);
        if (!ends.ingresses.empty()) {
            Intent in;
            in.endpoints = ends;
            in.selector.eth_type = EthType::Ipv4;
            in.selector.ip_dst_prefix = prefix;
            in.treatment.set_vlan = egress.vlan;
            in.owner = App::Sdnip;
            desired = std::move(in);
        }
    }

    auto current = transit_.find(prefix);
    if (!desired) {
        if (current != transit_.end()) {
            intents.withdraw(current->second, net);
            delta.withdrawn.push_back(current->second);
            transit_.erase(current);
        }
        return;
    }
    if (current != transit_.end()) {
        const Intent& existing = intents.get(current->second);
        if (existing.egress() == desired->egress() && existing.treatment == desired->treatment) {
            const auto& want = std::get<MultiPointToSinglePoint>(desired->endpoints).ingresses;
            if (std::get<MultiPointToSinglePoint>(existing.endpoints).ingresses != want) {
                intents.update_ingresses(current->second, want, net);
                delta.updated.push_back(current->second);
            }
            return;
        }
        intents.withdraw(current->second, net);
        delta.withdrawn.push_back(current->second);
        transit_.erase(current);
    }
    IntentId id = intents.submit(std::move(*desired), net);
    transit_[prefix] = id;
    delta.submitted.push_back(id);
}

} // namespace oxp
