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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/python/ast.hpp"

namespace qsynth::analyzer {

/// Measurement calls recognized in the `qml` namespace.
inline constexpr std::array<std::string_view, 7> kMeasurementNames = {
    "expval", "var", "probs", "sample", "counts", "state", "density_matrix",
};

bool is_measurement_name(std::string_view name);

/// Quantum-relevant features of one code sample. The union of gate names,
/// device types and measurement returns is the sample's quantum key set,
/// which the dataflow metric compares with a Jaccard index.
struct QuantumFeatureSet {
    std::set<std::string> gate_names;
    std::set<std::string> device_types;
    std::set<std::string> measurement_returns;
    std::set<std::string> imports;
    std::size_t qml_call_count = 0;
    std::size_t gate_count = 0;
    std::size_t measurement_count = 0;
    /// Calls through the deprecated `qml.templates.*` namespace.
    std::size_t deprecated_count = 0;

    std::set<std::string> key_set() const;

    bool operator==(const QuantumFeatureSet&) const = default;
};

void to_json(nlohmann::json& j, const QuantumFeatureSet& f);
void from_json(const nlohmann::json& j, QuantumFeatureSet& f);

/// One call resolved into the quantum framework namespace.
struct QmlCall {
    std::string path;  // e.g. "RX", "templates.AngleEmbedding", "device"
    const python::Node* call = nullptr;
    bool in_return = false;
};

/// Every call in `module` whose callee resolves into the quantum framework:
/// `qml.X(...)`, aliases of `import pennylane as ...`, and names bound by
/// `from pennylane[.sub] import X`. Calls through `pennylane.numpy` are
/// excluded. Order is pre-order traversal order.
std::vector<QmlCall> find_qml_calls(const python::Node& module);

/// Throws SyntaxError when `code` does not parse.
QuantumFeatureSet extract_features(std::string_view code);
QuantumFeatureSet extract_features(const python::Node& module);

/// Top-level module names bound by import statements anywhere in `module`.
std::set<std::string> imported_modules(const python::Node& module);

/// Lexical fallback for unparseable text: names following `qml.` in the token
/// stream (`qml . a . b` -> "a.b").
std::set<std::string> lexical_qml_names(std::string_view code);

}  // namespace qsynth::analyzer
