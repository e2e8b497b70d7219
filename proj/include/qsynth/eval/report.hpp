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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/analyzer/whitelist.hpp"
#include "qsynth/eval/metrics.hpp"
#include "qsynth/sandbox/classify.hpp"
#include "qsynth/sandbox/executor.hpp"

namespace qsynth::eval {

/// Final state of one solve run, read back from a trace line.
struct TraceRun {
    std::string challenge_id;
    int run = 0;
    bool passed = false;
    std::optional<std::string> code;
    sandbox::ErrorCategory category = sandbox::ErrorCategory::FormattingFailure;
    std::optional<sandbox::ExecutionResult> execution;
};

/// Reads a solve trace object (challenge_id, attempts, final_pass,
/// final_category, optional run). The last attempt supplies code and
/// execution. Throws ValidationError on missing fields.
TraceRun parse_trace(const nlohmann::json& row);

struct ChallengeReport {
    std::string id;
    std::size_t runs = 0;
    std::size_t passes = 0;
    /// Mean over runs; a run without code scores 0 everywhere. Absent without
    /// a reference solution.
    std::optional<CodeMetrics> metrics;
    /// Mean over runs, 0 for runs whose tests never reported.
    double partial_credit = 0;
    std::map<std::string, std::size_t> categories;
};

struct EvalReport {
    std::vector<ChallengeReport> challenges;
    std::size_t k = 0;  // attempts per challenge used for pass@k
    double pass_at_1 = 0;
    double pass_at_k = 0;
    CodeMetrics mean_metrics;
    std::size_t metric_challenges = 0;
    double partial_credit = 0;
    HallucinationStats hallucination;
    std::map<std::string, std::size_t> categories;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    /// Fixed-width table: id, runs, passes, CB, RL, AST, DF, PC.
    std::string table() const;
};

/// Groups runs by challenge (first appearance order, runs sorted by index)
/// and aggregates. k is reduced to the smallest run count when some
/// challenge has fewer runs, with a warning.
EvalReport evaluate(const std::vector<TraceRun>& runs, const std::map<std::string, std::string>& references,
                    const analyzer::Whitelist& whitelist, std::size_t k, unsigned workers = 1);

}  // namespace qsynth::eval
