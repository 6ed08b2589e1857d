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
#include <iosfwd>
#include <string>
#include <vector>

#include "oxp/api.hpp"

namespace oxp {

/// Sends one request to the controller API.
using Transport = std::function<ApiResponse(const std::string& method, const std::string& target,
                                            const std::string& body)>;

/// Talks to a running service, e.g. "http://127.0.0.1:8181".
Transport http_transport(const std::string& url);
/// Calls an in-process API directly.
Transport local_transport(Api& api);

/// Percent-encodes one path segment ("AMS/1" -> "AMS%2F1").
std::string encode_segment(const std::string& s);

/// Entry point of oxpctl. \p args excludes the program name. When
/// \p transport is null the transport is chosen from --server / --local.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Transport* transport = nullptr);

} // namespace oxp
