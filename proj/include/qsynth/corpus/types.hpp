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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/analyzer/features.hpp"

namespace qsynth::corpus {

enum class SourceCategory { Official, Community, Archive };

std::string_view to_string(SourceCategory c);
/// Throws ValidationError for anything other than official/community/archive.
SourceCategory parse_category(std::string_view s);

struct SourceRecord {
    std::string id;
    std::string origin_url;
    SourceCategory category = SourceCategory::Community;
    std::string raw_text;
};

enum class Classification { Direct, Contextual, Rejected };

std::string_view to_string(Classification c);
Classification parse_classification(std::string_view s);

struct ExtractedFunction {
    std::string id;  // parent_id:name:start_line
    std::string parent_id;
    std::string name;
    int start_line = 0;
    int end_line = 0;
    std::string code;
    Classification classification = Classification::Rejected;
    analyzer::QuantumFeatureSet features;
    SourceCategory category = SourceCategory::Community;
    std::string origin_url;
};

void to_json(nlohmann::json& j, const ExtractedFunction& f);
void from_json(const nlohmann::json& j, ExtractedFunction& f);

enum class Verdict { OriginalValid, TransformedValid, Rejected };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view s);

/// One corpus entry after verification (and, later, instruction pairing).
struct InstructionPair {
    std::string id;
    std::string instruction;
    std::string code;
    SourceCategory category = SourceCategory::Community;
    Verdict verdict = Verdict::OriginalValid;
    analyzer::QuantumFeatureSet features;
    std::string origin_url;
    std::vector<std::string> parent_ids;
    /// Set when the instruction failed validation after regeneration, or the
    /// gateway could not produce one.
    bool flagged = false;
    std::string flag_reason;
};

void to_json(nlohmann::json& j, const InstructionPair& p);
void from_json(const nlohmann::json& j, InstructionPair& p);

}  // namespace qsynth::corpus
