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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oxp/controller.hpp"
#include "oxp/error.hpp"

namespace oxp {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

int http_status(ErrorCode code);
nlohmann::json error_body(const Error& e);

/// Transport-independent REST front end. Mutations are serialized on one
/// writer lock; reads are answered from the last committed snapshot.
class Api {
public:
    explicit Api(Topology base = {});

    /// \p target is the raw request target, percent-encoded segments and
    /// query string included.
    ApiResponse handle(std::string_view method, std::string_view target, std::string_view body = {});

    std::shared_ptr<const Controller> snapshot() const;
    const Topology& base_topology() const { return base_; }

    /// Resets live state to the base topology and runs \p steps.
    nlohmann::json run_scenario(const nlohmann::json& steps);

    struct Call {
        std::map<std::string, std::string> params; // path captures
        std::map<std::string, std::string> query;
        nlohmann::json body;

        const std::string& param(const std::string& key) const { return params.at(key); }
        /// Body field, falling back to the query string.
        std::string arg(const char* key) const;
    };
    using ReadHandler = std::function<nlohmann::json(const Controller&, const Call&)>;
    using WriteHandler = std::function<nlohmann::json(Controller&, const Call&)>;

private:
    struct Endpoint {
        std::string method;
        std::vector<std::string> pattern;
        ReadHandler read;
        WriteHandler write;
    };

    void get(std::string pattern, ReadHandler h);
    void post(std::string pattern, WriteHandler h);
    void del(std::string pattern, WriteHandler h);
    void add(std::string method, std::string pattern, ReadHandler r, WriteHandler w);
    void publish();

    Topology base_;
    std::vector<Endpoint> routes_;

    std::mutex writer_;
    Controller live_;
    mutable std::mutex snapshot_mu_;
    std::shared_ptr<const Controller> snapshot_;
};

} // namespace oxp
