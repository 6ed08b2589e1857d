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

#include "oxp/intent.hpp"

#include <algorithm>
#include <stdexcept>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(IntentState s)
{
    switch (s) {
    case IntentState::Submitted: return "SUBMITTED";
    case IntentState::Installed: return "INSTALLED";
    case IntentState::Failed: return "FAILED";
    case IntentState::Withdrawn: return "WITHDRAWN";
    }
    return "UNKNOWN";
}

const ConnectPoint& Intent::egress() const
{
    return std::visit([](const auto& e) -> const ConnectPoint& { return e.egress; }, endpoints);
}

std::vector<ConnectPoint> Intent::ingresses() const
{
    if (const auto* p2p = std::get_if<PointToPoint>(&endpoints))
        return {p2p->ingress};
    const auto& mp = std::get<MultiPointToSinglePoint>(endpoints);
    return {mp.ingresses.begin(), mp.ingresses.end()};
}

std::optional<VlanId> CoreVlanPool::allocate(IntentId intent)
{
    if (auto it = by_intent_.find(intent); it != by_intent_.end())
        return it->second;
    for (int v = first_; v <= last_; ++v) {
        auto vlan = static_cast<VlanId>(v);
        if (!used_.contains(vlan)) {
            used_.insert(vlan);
            by_intent_[intent] = vlan;
            return vlan;
        }
    }
    return std::nullopt;
}

void CoreVlanPool::release(IntentId intent)
{
    if (auto it = by_intent_.find(intent); it != by_intent_.end()) {
        used_.erase(it->second);
        by_intent_.erase(it);
    }
}

std::optional<VlanId> CoreVlanPool::lookup(IntentId intent) const
{
    if (auto it = by_intent_.find(intent); it != by_intent_.end())
        return it->second;
    return std::nullopt;
}

namespace {

void require_edge_port(const Topology& topo, const ConnectPoint& cp)
{
    if (!topo.has_port(cp))
        throw Error(ErrorCode::Validation, "connect point " + cp.to_string() + " does not exist", cp.to_string());
    if (topo.is_link_port(cp))
        throw Error(ErrorCode::Validation, "connect point " + cp.to_string() + " is not an edge port",
                    cp.to_string());
}

void append_treatment(std::vector<Action>& actions, const Treatment& t)
{
    if (t.set_vlan)
        actions.push_back(SetVlan{*t.set_vlan});
    else if (t.pop_vlan)
        actions.push_back(PopVlan{});
}

FlowRule make_rule(const Intent& intent, const DeviceId& device, std::uint16_t priority, Match match,
                   std::vector<Action> actions)
{
    FlowRule r;
    r.device = device;
    r.priority = priority;
    r.match = std::move(match);
    r.actions = std::move(actions);
    r.owner = intent.owner;
    r.intent = intent.id;
    return r;
}

std::string describe(const std::set<ConnectPoint>& cps)
{
    std::string out;
    for (const auto& cp : cps)
        out += (out.empty() ? "" : ", ") + cp.to_string();
    return out;
}

} // namespace

void validate_intent(const Intent& intent, const Topology& topo)
{
    if (const auto* p2p = std::get_if<PointToPoint>(&intent.endpoints)) {
        if (p2p->ingress == p2p->egress)
            throw Error(ErrorCode::Validation, "ingress and egress must differ", p2p->ingress.to_string());
        require_edge_port(topo, p2p->ingress);
        require_edge_port(topo, p2p->egress);
    } else {
        const auto& mp = std::get<MultiPointToSinglePoint>(intent.endpoints);
        if (mp.ingresses.empty())
            throw Error(ErrorCode::Validation, "multipoint intent needs at least one ingress");
        if (mp.ingresses.contains(mp.egress))
            throw Error(ErrorCode::Validation, "egress must not be one of the ingresses", mp.egress.to_string());
        for (const auto& cp : mp.ingresses)
            require_edge_port(topo, cp);
        require_edge_port(topo, mp.egress);
    }
    const auto& s = intent.selector;
    if (s.vlan && !is_valid_vlan(*s.vlan))
        throw Error(ErrorCode::Validation, "selector VLAN out of range");
    if ((s.ip_src_prefix || s.ip_dst_prefix) && s.eth_type != EthType::Ipv4)
        throw Error(ErrorCode::Validation, "IP prefix selector requires eth_type IPV4");
    const auto& t = intent.treatment;
    if (t.set_vlan && t.pop_vlan)
        throw Error(ErrorCode::Validation, "treatment may carry at most one VLAN operation");
    if (t.set_vlan && !is_valid_vlan(*t.set_vlan))
        throw Error(ErrorCode::Validation, "treatment VLAN out of range");
}

std::vector<FlowRule> compile_p2p(const Intent& intent, const Topology& topo, std::optional<VlanId> core_vlan)
{
    const auto& ends = std::get<PointToPoint>(intent.endpoints);
    auto path = topo.shortest_path(ends.ingress.device, ends.egress.device);
    if (!path)
        throw Error(ErrorCode::NoPath,
                    "no path from " + ends.ingress.device.str() + " to " + ends.egress.device.str(),
                    ends.ingress.to_string());

    std::vector<FlowRule> rules;
    if (path->empty()) {
        std::vector<Action> actions;
        append_treatment(actions, intent.treatment);
        actions.push_back(Output{ends.egress.port});
        rules.push_back(make_rule(intent, ends.ingress.device, kP2pPriority,
                                  intent.selector.at_port(ends.ingress.port), std::move(actions)));
        return rules;
    }
    if (!core_vlan)
        throw std::logic_error("multi-device point-to-point compilation needs a core VLAN");

    rules.push_back(make_rule(intent, ends.ingress.device, kP2pPriority,
                              intent.selector.at_port(ends.ingress.port),
                              {SetVlan{*core_vlan}, Output{path->front().from.port}}));
    for (std::size_t i = 1; i < path->size(); ++i) {
        Match m;
        m.in_port = (*path)[i - 1].to.port;
        m.vlan = core_vlan;
        rules.push_back(make_rule(intent, (*path)[i].from.device, kP2pPriority, m, {Output{(*path)[i].from.port}}));
    }

    // The core VLAN replaced the client tag, so an empty treatment restores
    // the selector's VLAN (or strips the tag if the selector had none).
    std::vector<Action> egress_actions;
    if (!intent.treatment.empty())
        append_treatment(egress_actions, intent.treatment);
    else if (intent.selector.vlan)
        egress_actions.push_back(SetVlan{*intent.selector.vlan});
    else
        egress_actions.push_back(PopVlan{});
    egress_actions.push_back(Output{ends.egress.port});
    Match last;
    last.in_port = path->back().to.port;
    last.vlan = core_vlan;
    rules.push_back(make_rule(intent, ends.egress.device, kP2pPriority, last, std::move(egress_actions)));
    return rules;
}

Mp2spCompilation compile_mp2sp(const Intent& intent, const Topology& topo)
{
    const auto& ends = std::get<MultiPointToSinglePoint>(intent.endpoints);
    const auto& sel = intent.selector;
    auto priority = static_cast<std::uint16_t>(
        kTransitBasePriority + (sel.ip_dst_prefix ? sel.ip_dst_prefix->length() : 0));

    std::vector<Action> final_actions;
    append_treatment(final_actions, intent.treatment);
    final_actions.push_back(Output{ends.egress.port});

    Mp2spCompilation out;
    std::map<std::pair<DeviceId, Match>, FlowRule> rules;
    auto emit = [&](const DeviceId& device, PortNumber in_port, std::vector<Action> actions) {
        Match m = sel.at_port(in_port);
        auto key = std::make_pair(device, m);
        auto it = rules.find(key);
        if (it != rules.end()) {
            // Paths toward one egress form a tree, so shared rules agree.
            if (it->second.actions != actions)
                throw std::logic_error("transit compilation produced diverging rules on " + device.str());
            return;
        }
        rules.emplace(key, make_rule(intent, device, priority, std::move(m), std::move(actions)));
    };

    for (const auto& ingress : ends.ingresses) {
        auto path = topo.shortest_path(ingress.device, ends.egress.device);
        if (!path) {
            out.unreachable.insert(ingress);
            continue;
        }
        if (path->empty()) {
            emit(ingress.device, ingress.port, final_actions);
            continue;
        }
        emit(ingress.device, ingress.port, {Output{path->front().from.port}});
        for (std::size_t i = 1; i < path->size(); ++i)
            emit((*path)[i].from.device, (*path)[i - 1].to.port, {Output{(*path)[i].from.port}});
        emit(ends.egress.device, path->back().to.port, final_actions);
    }
    if (out.unreachable.size() == ends.ingresses.size())
        throw Error(ErrorCode::NoPath, "no ingress can reach " + ends.egress.to_string(),
                    ends.egress.to_string());
    for (auto& [key, rule] : rules)
        out.rules.push_back(std::move(rule));
    return out;
}

IntentId IntentService::submit(Intent intent, Network& net)
{
    validate_intent(intent, net.topology);
    intent.id = next_id_++;
    intent.state = IntentState::Submitted;
    intent.rules.clear();
    intent.core_vlan.reset();
    intent.unreachable.clear();
    intent.detail.clear();
    auto [it, _] = intents_.emplace(intent.id, std::move(intent));
    realize(it->second, net);
    return it->first;
}

void IntentService::withdraw(IntentId id, Network& net)
{
    auto it = intents_.find(id);
    if (it == intents_.end() || it->second.state == IntentState::Withdrawn)
        throw Error(ErrorCode::NotFound, "intent " + std::to_string(id) + " unknown or already withdrawn",
                    std::to_string(id));
    auto& intent = it->second;
    for (RuleId r : intent.rules)
        net.flows.remove(r);
    intent.rules.clear();
    pool_.release(id);
    intent.core_vlan.reset();
    intent.unreachable.clear();
    intent.state = IntentState::Withdrawn;
}

void IntentService::update_ingresses(IntentId id, std::set<ConnectPoint> ingresses, Network& net)
{
    auto& intent = mutable_intent(id);
    if (intent.state == IntentState::Withdrawn)
        throw Error(ErrorCode::NotFound, "intent " + std::to_string(id) + " already withdrawn", std::to_string(id));
    auto* mp = std::get_if<MultiPointToSinglePoint>(&intent.endpoints);
    if (!mp)
        throw Error(ErrorCode::Validation, "intent " + std::to_string(id) + " is not multipoint", std::to_string(id));
    Intent candidate = intent;
    std::get<MultiPointToSinglePoint>(candidate.endpoints).ingresses = ingresses;
    validate_intent(candidate, net.topology);
    mp->ingresses = std::move(ingresses);
    realize(intent, net);
}

std::vector<IntentId> IntentService::handle_topology_event(const TopologyEvent& event, Network& net)
{
    using Kind = TopologyEvent::Kind;
    bool down = event.kind == Kind::LinkDown || event.kind == Kind::DeviceDown;
    std::vector<IntentId> changed;
    for (auto& [id, intent] : intents_) {
        bool attempt = false;
        if (down)
            attempt = intent.state == IntentState::Installed && references(intent, event, net);
        else
            attempt = intent.state == IntentState::Failed ||
                      (intent.state == IntentState::Installed && !intent.unreachable.empty());
        if (attempt && realize(intent, net))
            changed.push_back(id);
    }
    return changed;
}

const Intent& IntentService::get(IntentId id) const
{
    auto it = intents_.find(id);
    if (it == intents_.end())
        throw Error(ErrorCode::NotFound, "unknown intent " + std::to_string(id), std::to_string(id));
    return it->second;
}

const Intent* IntentService::find(IntentId id) const
{
    auto it = intents_.find(id);
    return it == intents_.end() ? nullptr : &it->second;
}

Intent& IntentService::mutable_intent(IntentId id)
{
    auto it = intents_.find(id);
    if (it == intents_.end())
        throw Error(ErrorCode::NotFound, "unknown intent " + std::to_string(id), std::to_string(id));
    return it->second;
}

bool IntentService::realize(Intent& intent, Network& net)
{
    std::vector<FlowRule> desired;
    std::set<ConnectPoint> unreachable;
    try {
        if (const auto* p2p = std::get_if<PointToPoint>(&intent.endpoints)) {
            auto path = net.topology.shortest_path(p2p->ingress.device, p2p->egress.device);
            if (path && !path->empty()) {
                intent.core_vlan = pool_.allocate(intent.id);
                if (!intent.core_vlan) {
                    bool had = !intent.rules.empty();
                    fail(intent, net, "core VLAN pool exhausted");
                    return had;
                }
            } else if (path) {
                pool_.release(intent.id);
                intent.core_vlan.reset();
            }
            desired = compile_p2p(intent, net.topology, intent.core_vlan);
        } else {
            auto compiled = compile_mp2sp(intent, net.topology);
            desired = std::move(compiled.rules);
            unreachable = std::move(compiled.unreachable);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoPath)
            throw;
        bool had = !intent.rules.empty();
        fail(intent, net, e.what());
        return had;
    }

    // Keep installed rules that are still wanted; swap out the rest.
    std::multiset<FlowKey> wanted;
    for (const auto& r : desired)
        wanted.insert(FlowKey::of(r));
    std::vector<RuleId> kept;
    bool changed = false;
    for (RuleId id : intent.rules) {
        const FlowRule* r = net.flows.find(id);
        if (!r)
            continue;
        auto it = wanted.find(FlowKey::of(*r));
        if (it != wanted.end()) {
            wanted.erase(it);
            kept.push_back(id);
        } else {
            net.flows.remove(id);
            changed = true;
        }
    }
    intent.rules = kept;
    try {
        for (auto& r : desired) {
            auto it = wanted.find(FlowKey::of(r));
            if (it == wanted.end())
                continue;
            wanted.erase(it);
            intent.rules.push_back(net.flows.install(std::move(r), net.topology));
            changed = true;
        }
    } catch (const Error& e) {
        fail(intent, net, std::string("installation failed: ") + e.what());
        return true;
    }
    intent.state = IntentState::Installed;
    intent.unreachable = std::move(unreachable);
    intent.detail = intent.unreachable.empty() ? "" : "unreachable ingresses: " + describe(intent.unreachable);
    return changed;
}

void IntentService::fail(Intent& intent, Network& net, std::string detail)
{
    for (RuleId r : intent.rules)
        net.flows.remove(r);
    intent.rules.clear();
    pool_.release(intent.id);
    intent.core_vlan.reset();
    intent.unreachable.clear();
    intent.state = IntentState::Failed;
    intent.detail = std::move(detail);
}

bool IntentService::references(const Intent& intent, const TopologyEvent& event, const Network& net) const
{
    for (RuleId id : intent.rules) {
        const FlowRule* r = net.flows.find(id);
        if (!r)
            continue;
        if (event.device && r->device == *event.device)
            return true;
        if (event.link) {
            for (const auto& end : {event.link->a, event.link->b}) {
                if (r->device != end.device)
                    continue;
                if (r->match.in_port == end.port)
                    return true;
                for (const auto& a : r->actions)
                    if (const auto* out = std::get_if<Output>(&a); out && out->port == end.port)
                        return true;
            }
        }
    }
    return false;
}

} // namespace oxp
