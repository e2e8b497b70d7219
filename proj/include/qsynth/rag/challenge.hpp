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

namespace qsynth::rag {

/// One benchmark challenge, loaded from a bundle directory holding
/// description.md, template.py, tests.py, meta.json and an optional
/// reference.py solution used by the evaluator.
struct ChallengeTask {
    std::string id;
    std::string year;
    std::string description;
    std::string template_code;
    std::string tests_code;
    std::string reference_code;
    nlohmann::json meta = nlohmann::json::object();

    /// Throws ValidationError when description or tests are empty.
    void validate() const;
};

/// meta.json is optional; "id" defaults to the directory name.
ChallengeTask load_challenge(const std::filesystem::path& dir);

/// Every subdirectory of `root` that contains description.md, sorted by name.
std::vector<ChallengeTask> load_challenges(const std::filesystem::path& root);

}  // namespace qsynth::rag
