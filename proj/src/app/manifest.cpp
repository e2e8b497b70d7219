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

#include "qsynth/app/manifest.hpp"

#include "qsynth/util/io.hpp"

namespace qsynth::app {

nlohmann::json RunManifest::to_json() const {
    return {{"command", command},       {"argv", argv},     {"config", config},         {"seed", seed},
            {"inputs", inputs},         {"outputs", outputs}, {"stats", stats},         {"started_at", started_at},
            {"finished_at", finished_at}, {"status", status}, {"warnings", warnings}};
}

void RunManifest::write(const std::filesystem::path& path) {
    finished_at = io::utc_timestamp();
    io::write_file_atomic(path, to_json().dump(2) + "\n");
}

}  // namespace qsynth::app
