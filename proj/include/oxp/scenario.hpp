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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oxp/controller.hpp"

namespace oxp {

/// One scripted operator action. Scenario files are JSON arrays of
/// `{"action": "...", "params": {...}}` objects.
struct ScenarioStep {
    std::string action;
    nlohmann::json params = nlohmann::json::object();
    int line = 0; // 1-based line of the step in its file, 0 if unknown
};

struct StepOutcome {
    std::size_t index = 0;
    std::string action;
    bool ok = false;
    std::string detail;

    bool operator==(const StepOutcome&) const = default;
};

struct ScenarioReport {
    std::vector<StepOutcome> steps;
    std::size_t ok = 0;
    std::size_t failed = 0;
    nlohmann::json digest;

    bool passed() const { return failed == 0; }
};

/// Throws Error(Parse) with the offending line number.
std::vector<ScenarioStep> parse_scenario(std::string_view text);
std::vector<ScenarioStep> parse_scenario(const nlohmann::json& steps);
std::vector<ScenarioStep> load_scenario_file(const std::filesystem::path& path);

/// Steps of a file as a request body for another process: relative
/// topology paths are made absolute against the file's directory.
nlohmann::json scenario_request(const std::filesystem::path& path);

/// Executes steps in order. A failing step is reported and execution
/// continues with the next one.
class ScenarioRunner {
public:
    explicit ScenarioRunner(Controller& controller, std::filesystem::path base_dir = {})
        : controller_(controller), base_dir_(std::move(base_dir)) {}

    ScenarioReport run(const std::vector<ScenarioStep>& steps);
    /// Returns a short OK detail; throws on failure.
    std::string execute(const ScenarioStep& step);

private:
    std::string check(const nlohmann::json& params);

    Controller& controller_;
    std::filesystem::path base_dir_;
    std::map<std::string, Controller> before_peer_added_;
};

/// Runs a scenario file against `fresh` (usually an empty controller or one
/// holding only the configured topology).
ScenarioReport run_scenario_file(const std::filesystem::path& path, Controller& fresh);

nlohmann::json to_json(const ScenarioReport& report);

} // namespace oxp
