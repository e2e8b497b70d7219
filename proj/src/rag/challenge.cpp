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

#include "qsynth/rag/challenge.hpp"

#include <algorithm>
#include <set>

#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::rag {

namespace fs = std::filesystem;

void ChallengeTask::validate() const {
    if (id.empty()) throw ValidationError("challenge without id");
    if (text::trim(description).empty()) throw ValidationError("challenge " + id + " has an empty description");
    if (text::trim(tests_code).empty()) throw ValidationError("challenge " + id + " has no tests");
}

ChallengeTask load_challenge(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("challenge directory not found: " + dir.string());
    ChallengeTask t;
    if (fs::exists(dir / "meta.json")) {
        try {
            t.meta = nlohmann::json::parse(io::read_file(dir / "meta.json"));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("bad meta.json in " + dir.string() + ": " + e.what());
        }
        if (!t.meta.is_object()) throw ValidationError("meta.json in " + dir.string() + " is not an object");
    }
    t.id = t.meta.value("id", dir.filename().string());
    if (t.meta.contains("year")) t.year = t.meta["year"].is_string() ? t.meta["year"].get<std::string>() : t.meta["year"].dump();
    t.description = io::read_file(dir / "description.md");
    if (fs::exists(dir / "template.py")) t.template_code = io::read_file(dir / "template.py");
    t.tests_code = io::read_file(dir / "tests.py");
    if (fs::exists(dir / "reference.py")) t.reference_code = io::read_file(dir / "reference.py");
    t.validate();
    return t;
}

std::vector<ChallengeTask> load_challenges(const fs::path& root) {
    if (!fs::is_directory(root)) throw IoError("challenge root not found: " + root.string());
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory() && fs::exists(e.path() / "description.md")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<ChallengeTask> out;
    std::set<std::string> seen;
    for (const auto& d : dirs) {
        out.push_back(load_challenge(d));
        if (!seen.insert(out.back().id).second) throw ValidationError("duplicate challenge id " + out.back().id);
    }
    return out;
}

}  // namespace qsynth::rag
