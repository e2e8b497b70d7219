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

#include "qsynth/corpus/profile.hpp"

#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"

namespace qsynth::corpus {

Composition composition(const std::array<std::size_t, 3>& counts) {
    Composition c;
    c.counts = counts;
    for (auto n : counts) c.total += n;
    if (c.total == 0) return c;
    for (std::size_t i = 0; i < 3; ++i)
        c.percent[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(c.total);
    return c;
}

Composition composition(const std::vector<SourceCategory>& categories) {
    std::array<std::size_t, 3> counts{};
    for (auto cat : categories) ++counts[static_cast<std::size_t>(cat)];
    return composition(counts);
}

nlohmann::json Composition::to_json() const {
    nlohmann::json j = {{"total", total}};
    for (auto cat : {SourceCategory::Official, SourceCategory::Community, SourceCategory::Archive}) {
        auto i = static_cast<std::size_t>(cat);
        j[std::string(to_string(cat))] = {{"count", counts[i]}, {"percent", percent[i]}};
    }
    return j;
}

Composition profile_jsonl(const std::filesystem::path& path) {
    std::vector<SourceCategory> cats;
    std::size_t line = 0;
    for (const auto& row : io::read_jsonl(path)) {
        ++line;
        const char* key = row.is_object() && row.contains("source_category") ? "source_category" : "category";
        if (!row.is_object() || !row.contains(key) || !row[key].is_string())
            throw ValidationError(path.string() + ": row " + std::to_string(line) + " has no category");
        cats.push_back(parse_category(row[key].get<std::string>()));
    }
    return composition(cats);
}

}  // namespace qsynth::corpus
