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
#include <set>
#include <string>
#include <string_view>

#include "qsynth/analyzer/features.hpp"

namespace qsynth::analyzer {

/// Curated set of valid operation names. Immutable after construction.
///
/// File format: one name per line, `#` starts a comment, blank lines are
/// ignored. An entry `prefix.*` admits every dotted name under `prefix.`.
/// Lookups are case-sensitive.
class Whitelist {
public:
    /// Throws ValidationError when the text contains no names.
    static Whitelist parse(std::string_view text, std::string source_path = "<memory>");
    static Whitelist load(const std::filesystem::path& path);
    /// The starter list shipped with the library.
    static Whitelist builtin();

    bool contains(std::string_view name) const;

    const std::set<std::string>& allowed_names() const { return names_; }
    const std::set<std::string>& prefixes() const { return prefixes_; }
    const std::string& source_path() const { return source_path_; }

private:
    std::set<std::string> names_;
    std::set<std::string> prefixes_;
    std::string source_path_;
};

/// Names in gate_names ∪ measurement_returns that the whitelist rejects.
std::set<std::string> whitelist_violations(const QuantumFeatureSet& features, const Whitelist& wl);

}  // namespace qsynth::analyzer
