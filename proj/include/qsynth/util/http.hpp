// Copyright 2026 The qsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>

namespace qsynth::http {

struct Response {
    int status = 0;  // 0 when no HTTP response was received
    std::string body;
    std::string error;  // transport error description when status == 0
};

/// POSTs a JSON body to `url` (http or https). Never throws for transport
/// failures, they are reported through Response::error.
Response post_json(const std::string& url, const std::map<std::string, std::string>& headers, const std::string& body,
                   int timeout_seconds);

}  // namespace qsynth::http
