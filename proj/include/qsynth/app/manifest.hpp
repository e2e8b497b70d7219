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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qsynth::app {

/// Record of one command run, written next to its outputs.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json outputs = nlohmann::json::object();
    nlohmann::json stats = nlohmann::json::object();
    std::string started_at;
    std::string finished_at;
    /// complete, partial or failed.
    std::string status = "complete";
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    /// Stamps finished_at and writes atomically.
    void write(const std::filesystem::path& path);
};

}  // namespace qsynth::app
