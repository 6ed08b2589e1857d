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

#include "oxp/service.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "httplib.h"
#include "oxp/json_codec.hpp"
#include "oxp/scenario.hpp"
#include "oxp/topology_io.hpp"

namespace oxp {

void ServiceConfig::set_listen(const std::string& listen)
{
    auto colon = listen.rfind(':');
    std::string port_text = colon == std::string::npos ? listen : listen.substr(colon + 1);
    if (colon != std::string::npos && colon > 0)
        host = listen.substr(0, colon);
    try {
        std::size_t used = 0;
        int p = std::stoi(port_text, &used);
        if (used != port_text.size() || p < 0 || p > 65535)
            throw std::invalid_argument(port_text);
        port = p;
    } catch (const std::exception&) {
        throw Error(ErrorCode::Validation, "invalid listen address '" + listen + "'", listen);
    }
}

ServiceConfig load_service_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::NotFound, "cannot open config file " + path.string(), path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, "config " + path.string() + ": " + e.what(), path.string());
    }
    if (!doc.is_object())
        throw Error(ErrorCode::Validation, "config " + path.string() + " must be an object", path.string());

    ServiceConfig cfg;
    auto dir = path.parent_path();
    for (const auto& [key, value] : doc.items()) {
        if (key == "listen")
            cfg.set_listen(require_string(doc, "listen"));
        else if (key == "topology") {
            cfg.topology = require_string(doc, "topology");
            std::filesystem::path p(cfg.topology);
            if (cfg.topology != "gts7" && cfg.topology.rfind("builtin:", 0) != 0 && p.is_relative())
                cfg.topology = (dir / p).string();
        } else if (key == "scenario") {
            if (value.is_null())
                continue;
            std::filesystem::path p(require_string(doc, "scenario"));
            cfg.scenario = p.is_relative() ? dir / p : p;
        } else
            throw Error(ErrorCode::Validation, "unknown config field '" + key + "'", key);
    }
    return cfg;
}

ServiceConfig service_config_from_env()
{
    if (const char* path = std::getenv("OXP_CONFIG"); path && *path)
        return load_service_config(path);
    return {};
}

std::unique_ptr<Api> make_api(const ServiceConfig& config)
{
    auto api = std::make_unique<Api>(load_named_topology(config.topology));
    if (config.scenario) {
        auto report = api->run_scenario(scenario_request(*config.scenario));
        std::cerr << "autorun " << config.scenario->string() << ": " << report["summary"].dump() << "\n";
    }
    return api;
}

HttpServer::HttpServer(Api& api) : api_(api), server_(std::make_unique<httplib::Server>())
{
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        auto target = req.target.empty() ? req.path : req.target;
        auto reply = api_.handle(req.method, target, req.body);
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    server_->Get(".*", forward);
    server_->Post(".*", forward);
    server_->Delete(".*", forward);
    server_->Options(".*", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        throw Error(ErrorCode::Unavailable, "cannot bind " + host + ":" + std::to_string(port),
                    host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::start()
{
    thread_ = std::thread([this] { listen(); });
    server_->wait_until_ready();
}

void HttpServer::stop()
{
    if (server_)
        server_->stop();
    if (thread_.joinable())
        thread_.join();
}

int serve(const ServiceConfig& config)
{
    auto api = make_api(config);
    HttpServer server(*api);
    int port = server.bind(config.host, config.port);
    std::cerr << "oxp controller listening on " << config.host << ":" << port << " ("
              << api->base_topology().devices().size() << " devices)\n";
    server.listen();
    return 0;
}

} // namespace oxp
