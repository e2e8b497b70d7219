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

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/corpus/types.hpp"

namespace qsynth::corpus {

/// Source mix of a corpus, in official / community / archive order.
struct Composition {
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> percent{};
    std::size_t total = 0;

    nlohmann::json to_json() const;
};

/// Percentages of the total, 0 for an empty corpus.
Composition composition(const std::array<std::size_t, 3>& counts);
Composition composition(const std::vector<SourceCategory>& categories);

/// Counts the "source_category" (or "category") field of every row of a JSONL corpus file (source
/// manifest, functions, verified entries or pairs). Throws ValidationError
/// on rows without a valid category.
Composition profile_jsonl(const std::filesystem::path& path);

}  // namespace qsynth::corpus
