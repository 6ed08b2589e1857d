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

#include "oxp/cluster.hpp"

#include <algorithm>

#include "oxp/error.hpp"

namespace oxp {

std::string_view to_string(InstanceState s) { return s == InstanceState::Alive ? "ALIVE" : "DEAD"; }

void Cluster::init(std::vector<std::string> instances, std::vector<DeviceId> devices)
{
    if (instances.empty())
        throw Error(ErrorCode::Validation, "a cluster needs at least one instance");
    std::sort(instances.begin(), instances.end());
    if (std::adjacent_find(instances.begin(), instances.end()) != instances.end())
        throw Error(ErrorCode::Validation, "duplicate instance name", *std::adjacent_find(instances.begin(), instances.end()));
    for (const auto& name : instances)
        if (name.empty())
            throw Error(ErrorCode::Validation, "instance names must be non-empty");
    std::sort(devices.begin(), devices.end());
    devices.erase(std::unique(devices.begin(), devices.end()), devices.end());

    instances_.clear();
    preferences_.clear();
    for (const auto& name : instances)
        instances_[name] = InstanceState::Alive;
    for (std::size_t i = 0; i < devices.size(); ++i) {
        const auto& master = instances[i % instances.size()];
        std::vector<std::string> prefs{master};
        for (const auto& name : instances)
            if (name != master)
                prefs.push_back(name);
        preferences_[devices[i]] = std::move(prefs);
    }
}

bool Cluster::any_alive() const
{
    return std::any_of(instances_.begin(), instances_.end(),
                       [](const auto& kv) { return kv.second == InstanceState::Alive; });
}

std::optional<std::string> Cluster::current_master(const DeviceId& device) const
{
    auto it = preferences_.find(device);
    if (it == preferences_.end())
        throw Error(ErrorCode::NotFound, "device " + device.str() + " is not in the mastership map", device.str());
    for (const auto& name : it->second)
        if (instances_.at(name) == InstanceState::Alive)
            return name;
    return std::nullopt;
}

const std::string& Cluster::master_of(const DeviceId& device) const
{
    auto it = preferences_.find(device);
    if (it == preferences_.end())
        throw Error(ErrorCode::NotFound, "device " + device.str() + " is not in the mastership map", device.str());
    for (const auto& name : it->second)
        if (instances_.at(name) == InstanceState::Alive)
            return name;
    throw Error(ErrorCode::Unavailable, "no ALIVE controller instance", device.str());
}

std::map<DeviceId, std::optional<std::string>> Cluster::masters() const
{
    std::map<DeviceId, std::optional<std::string>> out;
    for (const auto& [device, _] : preferences_)
        out[device] = current_master(device);
    return out;
}

MastershipChange Cluster::fail_instance(const std::string& id)
{
    return transition(id, InstanceState::Dead);
}

MastershipChange Cluster::recover_instance(const std::string& id)
{
    return transition(id, InstanceState::Alive);
}

MastershipChange Cluster::transition(const std::string& id, InstanceState to)
{
    auto it = instances_.find(id);
    if (it == instances_.end())
        throw Error(ErrorCode::NotFound, "unknown instance " + id, id);
    if (it->second == to)
        throw Error(ErrorCode::Conflict, "instance " + id + " is already " + std::string(to_string(to)), id);
    auto before = masters();
    it->second = to;
    MastershipChange change;
    for (const auto& [device, master] : masters())
        if (master != before.at(device))
            change.reassignments.push_back({device, master});
    change.all_dead = !any_alive();
    return change;
}

} // namespace oxp
