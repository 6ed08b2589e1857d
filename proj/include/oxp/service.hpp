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
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "oxp/api.hpp"

namespace httplib {
class Server;
}

namespace oxp {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8181;
    /// A topology file path or a built-in name such as "gts7".
    std::string topology = "gts7";
    std::optional<std::filesystem::path> scenario;

    /// Parses "host:port", ":port" or "port".
    void set_listen(const std::string& listen);
};

/// Reads a JSON config `{listen, topology, scenario}`. Relative paths are
/// resolved against the config file's directory.
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Config from $OXP_CONFIG if set, otherwise defaults.
ServiceConfig service_config_from_env();

/// Builds the API for \p config: loads the topology and runs the autorun
/// scenario. Throws Error naming the missing path on startup failures.
std::unique_ptr<Api> make_api(const ServiceConfig& config);

/// HTTP front end over an Api.
class HttpServer {
public:
    explicit HttpServer(Api& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks an ephemeral port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    /// Runs listen() on a background thread.
    void start();
    void stop();

private:
    Api& api_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

/// Loads config, serves until the process is stopped.
int serve(const ServiceConfig& config);

} // namespace oxp
