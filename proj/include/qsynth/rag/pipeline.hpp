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

#include <chrono>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/analyzer/whitelist.hpp"
#include "qsynth/llm/gateway.hpp"
#include "qsynth/rag/challenge.hpp"
#include "qsynth/retrieval/index.hpp"
#include "qsynth/sandbox/classify.hpp"
#include "qsynth/sandbox/executor.hpp"

namespace qsynth::rag {

/// No usable code block in a model response.
class FormatError : public Error {
public:
    using Error::Error;
};

struct PipelineConfig {
    double tau = 0.60;
    std::size_t k = 5;
    int max_fixes = 2;
    double temperature = 0.7;
    int max_tokens = 3000;
    std::string model_id;
    /// Off: no expansion or retrieval, always the base prompt.
    bool retrieval = true;
    /// Off: the description is used as the query unchanged.
    bool expand = true;
    std::chrono::duration<double> execution_limit = std::chrono::seconds(60);

    /// Throws ValidationError unless 0 <= tau <= 1, k >= 1, max_fixes >= 0.
    void validate() const;
    llm::ChatRequest request() const;
};

struct PromptTemplates {
    std::string system;
    std::string expand;   // {{description}}
    std::string base;     // {{description}} {{template}}
    std::string rag;      // + {{examples}}
    std::string example;  // {{rank}} {{score}} {{instruction}} {{code}}
    std::string fix;      // {{description}} {{template}} {{previous_code}} {{feedback}} {{examples_section}}

    static PromptTemplates builtin();
    /// Files under `dir`/prompts override the built-ins one by one.
    static PromptTemplates load(const std::filesystem::path& dir);
};

inline constexpr std::string_view kSelectiveContextSentence =
    "If retrieved examples are not relevant to this challenge, ignore them and rely on your own PennyLane knowledge.";

enum class PromptKind { Base, Rag };
std::string_view to_string(PromptKind k);

struct Prompt {
    PromptKind kind = PromptKind::Base;
    std::string system;
    std::string user;
};

/// Framework-oriented rewrite of the description. Falls back to the
/// description itself when the gateway fails or returns nothing.
std::string expand_query(const ChallengeTask& task, llm::Gateway& gateway, const PromptTemplates& templates = PromptTemplates::builtin(),
                         const llm::ChatRequest& defaults = {});

/// Base prompt when nothing was retrieved or the best score is below tau,
/// otherwise the prompt with the retrieved examples.
Prompt build_prompt(const ChallengeTask& task, const retrieval::Retrieval& retrieved, const PipelineConfig& cfg,
                    const PromptTemplates& templates = PromptTemplates::builtin());

/// First ```python block, else the largest fenced block, else the whole
/// response. Throws FormatError unless the result parses.
std::string extract_code(std::string_view response);

/// Test counts, failed test messages and the end of stderr.
std::string execution_feedback(const sandbox::ExecutionResult& r);

struct GenerationAttempt {
    int iteration = 0;
    std::string response;
    std::optional<std::string> code;  // nullopt on a formatting failure
    std::string format_error;
    std::optional<sandbox::ExecutionResult> execution;
    sandbox::ErrorCategory category = sandbox::ErrorCategory::FormattingFailure;

    bool passed() const { return execution && execution->passed; }
};

struct SolveOutcome {
    std::string challenge_id;
    std::string expanded_query;
    std::vector<retrieval::Hit> hits;
    double max_score = -std::numeric_limits<double>::infinity();
    PromptKind prompt_kind = PromptKind::Base;
    std::vector<GenerationAttempt> attempts;
    bool final_pass = false;
    /// Set when a gateway failure stopped the loop.
    std::string error;

    sandbox::ErrorCategory final_category() const;
    const GenerationAttempt* final_attempt() const;
    nlohmann::json to_json() const;
};

struct SolveContext {
    llm::Gateway* gateway = nullptr;
    sandbox::Executor* executor = nullptr;
    const retrieval::KnowledgeBase* knowledge = nullptr;
    const retrieval::EmbeddingProvider* embedder = nullptr;
    const analyzer::Whitelist* whitelist = nullptr;
    const sandbox::ClassifierRules* rules = nullptr;
    PromptTemplates templates = PromptTemplates::builtin();
};

/// Expansion, retrieval, generation and execution followed by at most
/// cfg.max_fixes repair rounds, stopping at the first pass.
SolveOutcome solve(const ChallengeTask& task, const SolveContext& ctx, const PipelineConfig& cfg);

/// Challenges in parallel; outcomes in input order.
std::vector<SolveOutcome> solve_all(const std::vector<ChallengeTask>& tasks, const SolveContext& ctx,
                                    const PipelineConfig& cfg, unsigned workers = 1);

}  // namespace qsynth::rag
