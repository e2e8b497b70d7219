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
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qsynth::io {

namespace fs = std::filesystem;

/// Throws IoError when the file cannot be read.
std::string read_file(const fs::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view content);

/// One JSON value per non-blank line. Throws ValidationError with the line
/// number on malformed input.
std::vector<nlohmann::json> read_jsonl(const fs::path& path);
std::vector<nlohmann::json> parse_jsonl(std::string_view text);
std::string to_jsonl(const std::vector<nlohmann::json>& rows);
void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& rows);

/// Built-in copy of a file shipped under `resources/` (e.g. "prompts/base.txt").
/// Throws ValidationError for unknown names.
std::string_view embedded_resource(std::string_view name);
std::vector<std::string> embedded_resource_names();

/// Reads `name` from `override_dir` when that directory is set and contains
/// it, otherwise returns the embedded copy.
std::string load_resource(std::string_view name, const fs::path& override_dir = {});

/// Current UTC time as an ISO-8601 string.
std::string utc_timestamp();

}  // namespace qsynth::io
