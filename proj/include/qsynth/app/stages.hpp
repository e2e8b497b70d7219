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
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/app/config.hpp"
#include "qsynth/corpus/stage1.hpp"
#include "qsynth/corpus/stage2.hpp"
#include "qsynth/corpus/stage3.hpp"
#include "qsynth/corpus/types.hpp"

namespace qsynth::app {

template <typename T>
struct StageOutput {
    std::vector<T> items;
    nlohmann::json stats = nlohmann::json::object();
    std::vector<std::string> warnings;
    /// Some items could not be fully processed (gateway failures, unpaired).
    bool partial = false;
};

StageOutput<corpus::ExtractedFunction> run_extract(const std::vector<corpus::SourceRecord>& records, const Config& cfg);

struct VerifyOutput : StageOutput<corpus::InstructionPair> {
    std::vector<nlohmann::json> reports;  // one per input function
};
/// Rejected entries are reported but not returned. `gateway` may be null,
/// in which case nothing is modernized.
VerifyOutput run_verify(const std::vector<corpus::ExtractedFunction>& functions, llm::Gateway* gateway, const Config& cfg);

struct DedupOutput : StageOutput<corpus::InstructionPair> {
    std::vector<corpus::DuplicateRecord> duplicates;
};
DedupOutput run_dedup(const std::vector<corpus::InstructionPair>& entries, const Config& cfg);

StageOutput<corpus::InstructionPair> run_instruct(const std::vector<corpus::InstructionPair>& entries, llm::Gateway& gateway,
                                                  const Config& cfg);

std::vector<nlohmann::json> to_rows(const std::vector<corpus::ExtractedFunction>& v);
std::vector<nlohmann::json> to_rows(const std::vector<corpus::InstructionPair>& v);
std::vector<corpus::ExtractedFunction> read_functions(const std::filesystem::path& path);
std::vector<corpus::InstructionPair> read_pairs(const std::filesystem::path& path);

}  // namespace qsynth::app
