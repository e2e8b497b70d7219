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
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/analyzer/features.hpp"
#include "qsynth/corpus/types.hpp"
#include "qsynth/llm/gateway.hpp"

namespace qsynth::corpus {

struct ModernizePrompts {
    std::string system;
    std::string user;  // contains {{code}}

    static ModernizePrompts builtin();
    /// Files modernize_system.txt / modernize_user.txt in `dir` override the
    /// built-in texts.
    static ModernizePrompts load(const std::filesystem::path& dir);
};

/// Asks the gateway to replace deprecated API usage and returns its reply
/// with markdown fences removed. Throws ValidationError if `code` does not
/// parse; gateway failures propagate as GatewayError.
std::string modernize(std::string_view code, llm::Gateway& gateway, const ModernizePrompts& prompts = ModernizePrompts::builtin(),
                      const llm::ChatRequest& defaults = {});

struct LayerResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerificationReport {
    /// syntax, imports, quantum_preservation, semantic_structure
    std::array<LayerResult, 4> layers;
    Verdict verdict = Verdict::Rejected;
    bool fallback_applied = false;
    analyzer::QuantumFeatureSet original_features;
    std::optional<analyzer::QuantumFeatureSet> transformed_features;

    bool all_passed() const;
    nlohmann::json to_json() const;
};

struct VerifyThresholds {
    double max_gate_change = 0.20;
    double max_qml_call_change = 0.50;
};

/// Libraries whose imports the transformed code must keep.
inline const std::set<std::string> kQuantumRelevantModules = {"pennylane", "numpy", "scipy", "jax", "autograd"};

/// Top-level shape of one return statement: none, list, tuple, dict or single.
std::string return_shape(const python::Node& ret);
/// Shapes of every return statement in source order.
std::vector<std::string> return_shapes(const python::Node& module);

/// Four-layer check of a transformation:
///   1 syntax               the transformed code parses
///   2 imports              quantum-relevant imports of the original are kept
///   3 quantum_preservation gate and qml-call counts change within thresholds,
///                          measurement count and measurement returns unchanged
///   4 semantic_structure   same number and shapes of return statements
/// Without a transformed text the original is checked alone. When any layer
/// fails the original is kept if it parses and either makes no qml calls or
/// imports the framework; otherwise the entry is rejected.
VerificationReport verify(std::string_view original, std::optional<std::string_view> transformed,
                          const VerifyThresholds& thresholds = {});

struct Stage2Options {
    bool modernize = false;
    /// Only send code that uses deprecated namespaces to the gateway.
    bool only_deprecated = true;
    VerifyThresholds thresholds;
    ModernizePrompts prompts = ModernizePrompts::builtin();
    llm::ChatRequest request_defaults;
};

struct Stage2Outcome {
    InstructionPair entry;  // instruction left empty
    VerificationReport report;
    bool modernization_attempted = false;
    std::string gateway_error;
};

/// Verifies (and optionally modernizes) one extracted function. The returned
/// entry holds the transformed code when the verdict is transformed_valid and
/// the original code otherwise.
Stage2Outcome process(const ExtractedFunction& fn, llm::Gateway* gateway, const Stage2Options& options);

}  // namespace qsynth::corpus
