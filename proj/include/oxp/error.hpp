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

#include <stdexcept>
#include <string>
#include <string_view>

namespace oxp {

enum class ErrorCode {
    Validation,
    Conflict,
    Isolation,
    NotFound,
    NoPath,
    Unavailable,
    Parse,
};

std::string_view to_string(ErrorCode code);

/// Controller error. Carries a machine-readable code and the name of the
/// offending element so the gateway can render `{code, message, subject}`.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string subject = {})
        : std::runtime_error(std::move(message)),
          code_(code),
          subject_(std::move(subject)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

} // namespace oxp
