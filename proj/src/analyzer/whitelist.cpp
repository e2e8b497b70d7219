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

#include "qsynth/analyzer/whitelist.hpp"

#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::analyzer {

Whitelist Whitelist::parse(std::string_view text, std::string source_path) {
    Whitelist wl;
    wl.source_path_ = std::move(source_path);
    for (const auto& raw : text::split_lines(text)) {
        std::string line = raw.substr(0, raw.find('#'));
        line = text::trim(line);
        if (line.empty()) continue;
        if (line.size() > 2 && line.compare(line.size() - 2, 2, ".*") == 0) {
            wl.prefixes_.insert(line.substr(0, line.size() - 1));  // keeps the trailing dot
        } else {
            wl.names_.insert(line);
        }
    }
    if (wl.names_.empty() && wl.prefixes_.empty()) throw ValidationError("whitelist " + wl.source_path_ + " is empty");
    return wl;
}

Whitelist Whitelist::load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.string());
}

Whitelist Whitelist::builtin() {
    return parse(io::embedded_resource("whitelist.txt"), "<builtin>/whitelist.txt");
}

bool Whitelist::contains(std::string_view name) const {
    if (names_.count(std::string(name))) return true;
    for (const auto& prefix : prefixes_) {
        if (name.size() > prefix.size() && name.substr(0, prefix.size()) == prefix) return true;
    }
    return false;
}

std::set<std::string> whitelist_violations(const QuantumFeatureSet& features, const Whitelist& wl) {
    std::set<std::string> out;
    for (const auto& n : features.gate_names)
        if (!wl.contains(n)) out.insert(n);
    for (const auto& n : features.measurement_returns)
        if (!wl.contains(n)) out.insert(n);
    return out;
}

}  // namespace qsynth::analyzer
