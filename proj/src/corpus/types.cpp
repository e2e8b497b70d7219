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

#include "qsynth/corpus/types.hpp"

#include "qsynth/util/error.hpp"

namespace qsynth::corpus {

std::string_view to_string(SourceCategory c) {
    switch (c) {
        case SourceCategory::Official: return "official";
        case SourceCategory::Community: return "community";
        case SourceCategory::Archive: return "archive";
    }
    return "community";
}

SourceCategory parse_category(std::string_view s) {
    if (s == "official") return SourceCategory::Official;
    if (s == "community") return SourceCategory::Community;
    if (s == "archive") return SourceCategory::Archive;
    throw ValidationError("unknown source category: " + std::string(s));
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Direct: return "direct";
        case Classification::Contextual: return "contextual";
        case Classification::Rejected: return "rejected";
    }
    return "rejected";
}

Classification parse_classification(std::string_view s) {
    if (s == "direct") return Classification::Direct;
    if (s == "contextual") return Classification::Contextual;
    if (s == "rejected") return Classification::Rejected;
    throw ValidationError("unknown classification: " + std::string(s));
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::OriginalValid: return "original_valid";
        case Verdict::TransformedValid: return "transformed_valid";
        case Verdict::Rejected: return "rejected";
    }
    return "rejected";
}

Verdict parse_verdict(std::string_view s) {
    if (s == "original_valid") return Verdict::OriginalValid;
    if (s == "transformed_valid") return Verdict::TransformedValid;
    if (s == "rejected") return Verdict::Rejected;
    throw ValidationError("unknown verdict: " + std::string(s));
}

void to_json(nlohmann::json& j, const ExtractedFunction& f) {
    j = nlohmann::json{
        {"id", f.id},
        {"parent_id", f.parent_id},
        {"name", f.name},
        {"span", {f.start_line, f.end_line}},
        {"code", f.code},
        {"classification", to_string(f.classification)},
        {"features", f.features},
        {"source_category", to_string(f.category)},
        {"origin_url", f.origin_url},
    };
}

void from_json(const nlohmann::json& j, ExtractedFunction& f) {
    f.id = j.at("id").get<std::string>();
    f.parent_id = j.value("parent_id", "");
    f.name = j.value("name", "");
    if (j.contains("span")) {
        f.start_line = j["span"].at(0).get<int>();
        f.end_line = j["span"].at(1).get<int>();
    }
    f.code = j.at("code").get<std::string>();
    f.classification = parse_classification(j.value("classification", "direct"));
    if (j.contains("features")) f.features = j["features"].get<analyzer::QuantumFeatureSet>();
    f.category = parse_category(j.value("source_category", "community"));
    f.origin_url = j.value("origin_url", "");
}

void to_json(nlohmann::json& j, const InstructionPair& p) {
    j = nlohmann::json{
        {"id", p.id},
        {"instruction", p.instruction},
        {"code", p.code},
        {"source_category", to_string(p.category)},
        {"verdict", to_string(p.verdict)},
        {"features", p.features},
        {"provenance", {{"origin_url", p.origin_url}, {"parent_ids", p.parent_ids}}},
    };
    if (p.flagged) {
        j["flagged"] = true;
        j["flag_reason"] = p.flag_reason;
    }
}

void from_json(const nlohmann::json& j, InstructionPair& p) {
    p.id = j.at("id").get<std::string>();
    p.instruction = j.value("instruction", "");
    p.code = j.at("code").get<std::string>();
    p.category = parse_category(j.value("source_category", "community"));
    p.verdict = parse_verdict(j.value("verdict", "original_valid"));
    if (j.contains("features")) p.features = j["features"].get<analyzer::QuantumFeatureSet>();
    if (j.contains("provenance")) {
        const auto& prov = j["provenance"];
        p.origin_url = prov.value("origin_url", "");
        p.parent_ids = prov.value("parent_ids", std::vector<std::string>{});
    }
    p.flagged = j.value("flagged", false);
    p.flag_reason = j.value("flag_reason", "");
}

}  // namespace qsynth::corpus
