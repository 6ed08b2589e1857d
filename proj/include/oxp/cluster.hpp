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
#include <string>
#include <vector>

#include "oxp/net_types.hpp"

namespace oxp {

enum class InstanceState { Alive, Dead };
std::string_view to_string(InstanceState s);

struct Reassignment {
    DeviceId device;
    std::optional<std::string> new_master; // nullopt when no instance is alive

    bool operator==(const Reassignment&) const = default;
};

struct MastershipChange {
    std::vector<Reassignment> reassignments;
    bool all_dead = false;
};

/// Logical controller cluster. Each device keeps a fixed preference list of
/// instances; its master is the first ALIVE entry. Failover and preference
/// based fail-back both fall out of that rule.
class Cluster {
public:
    /// Devices sorted by name are dealt round-robin to instances sorted by
    /// name; the backups of a device are the remaining instances in name order.
    void init(std::vector<std::string> instances, std::vector<DeviceId> devices);

    MastershipChange fail_instance(const std::string& id);
    MastershipChange recover_instance(const std::string& id);

    const std::string& master_of(const DeviceId& device) const;
    std::optional<std::string> current_master(const DeviceId& device) const;

    bool initialized() const { return !instances_.empty(); }
    bool any_alive() const;
    const std::map<std::string, InstanceState>& instances() const { return instances_; }
    const std::map<DeviceId, std::vector<std::string>>& preferences() const { return preferences_; }
    std::map<DeviceId, std::optional<std::string>> masters() const;

    bool operator==(const Cluster&) const = default;

private:
    MastershipChange transition(const std::string& id, InstanceState to);

    std::map<std::string, InstanceState> instances_;
    std::map<DeviceId, std::vector<std::string>> preferences_;
};

} // namespace oxp
