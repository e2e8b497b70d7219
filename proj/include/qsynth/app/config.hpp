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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "qsynth/corpus/instruct.hpp"
#include "qsynth/corpus/stage2.hpp"
#include "qsynth/corpus/stage3.hpp"
#include "qsynth/llm/gateway.hpp"
#include "qsynth/rag/pipeline.hpp"
#include "qsynth/retrieval/embedding.hpp"
#include "qsynth/sandbox/executor.hpp"

namespace qsynth::app {

/// One entry of the "providers" section. type is "mock" (scripted replies,
/// optional "script" file) or "http" (OpenAI-compatible endpoint).
struct ProviderSpec {
    std::string name;
    std::string type = "mock";
    nlohmann::json settings = nlohmann::json::object();
};

struct EmbeddingSpec {
    std::string type = "hashing";  // hashing | http
    std::size_t dim = 768;
    nlohmann::json settings = nlohmann::json::object();
};

struct Config {
    std::uint64_t seed = corpus::kDefaultSeed;
    unsigned workers = 0;  // 0: one per core
    /// Directory overriding the built-in prompts, whitelist, verbs and rules.
    std::filesystem::path resources_dir;

    std::string provider = "mock";
    std::map<std::string, ProviderSpec> providers;
    llm::GatewayOptions gateway;

    EmbeddingSpec embedding;

    bool modernize = true;
    bool only_deprecated = true;
    corpus::VerifyThresholds thresholds;

    double dedup_threshold = 0.70;
    std::size_t dedup_bands = 32;
    std::size_t dedup_rows = 4;

    corpus::InstructionLimits instruction_limits;
    int regenerations = 1;

    rag::PipelineConfig rag;
    std::size_t runs = 1;

    std::string python = "python3";
    std::filesystem::path shim;
    unsigned max_concurrent = 4;
    std::size_t output_cap = 64 * 1024;

    std::size_t eval_k = 5;

    /// Relative paths in the file resolve against its directory. Unknown keys
    /// are rejected. Throws ValidationError or IoError.
    static Config load(const std::filesystem::path& path);
    static Config from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
    nlohmann::json to_json() const;

    unsigned effective_workers() const;
    /// Throws ValidationError on out-of-range values.
    void validate() const;
};

/// Chat provider named by `cfg.provider`. "mock" without a providers entry
/// yields an empty scripted provider.
std::shared_ptr<llm::ChatProvider> make_chat_provider(const Config& cfg);
std::unique_ptr<retrieval::EmbeddingProvider> make_embedding_provider(const Config& cfg);
sandbox::SubprocessOptions executor_options(const Config& cfg);

}  // namespace qsynth::app
