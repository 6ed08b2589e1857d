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

#include <filesystem>
#include <string_view>

#include "json.hpp"
#include "oxp/topology.hpp"

namespace oxp {

/// Builds a Topology from a topology document:
///
///   { "devices": [{"id": "AMS", "ports": 8}],
///     "links":   [{"a": "AMS/1", "b": "MIL/1"}],
///     "hosts":   [{"cp": "AMS/5", "name": "speaker", "mac": "...", "ip": "..."}] }
///
/// Unknown fields are rejected. Throws Error(Parse) for malformed text and
/// Error(Validation) naming the offending element otherwise.
Topology load_topology(const nlohmann::json& doc);
Topology load_topology(std::string_view text);
Topology load_topology_file(const std::filesystem::path& path);

nlohmann::json topology_document(const Topology& topo);

/// The default seven-PoP pilot topology: ring
/// AMS-LON-PRG-BRA-MIL-POP6-POP7-AMS with chords AMS-MIL and LON-BRA.
/// Ports 1-3 are reserved for links, ports 4-8 are edge ports.
std::string_view gts7_document();
Topology gts7();

/// Resolves "builtin:gts7" / "gts7" or a file path.
Topology load_named_topology(const std::string& source);

} // namespace oxp
