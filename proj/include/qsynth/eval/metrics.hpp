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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qsynth/analyzer/whitelist.hpp"
#include "qsynth/sandbox/executor.hpp"
#include "qsynth/util/error.hpp"

namespace qsynth::eval {

class EmptyInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientAttempts : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NoTests : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Lexical tokens used by every n-gram metric. Throws EmptyInput when empty.
std::vector<std::string> metric_tokens(std::string_view code);

/// BLEU-4, uniform weights, brevity penalty. An order n >= 2 with no matching
/// n-gram contributes (0 + 1) / (count + 1).
double bleu(const std::vector<std::string>& hypothesis, const std::vector<std::string>& reference);
double token_bleu(std::string_view h, std::string_view r);

/// Every `qml . name (. name)*` run repeated three times in place.
std::vector<std::string> upweight_qml(const std::vector<std::string>& tokens);
double weighted_bleu(std::string_view h, std::string_view r);

/// Anonymized signatures of all subtrees of height >= 2, with multiplicity.
/// Identifiers, attribute names and constant values are dropped; node kinds,
/// operators and constant types are kept. Throws SyntaxError.
std::multiset<std::string> syntax_subtrees(std::string_view code);
/// Share of the reference's subtrees found in the hypothesis (multiset
/// intersection). 0 when h does not parse; 1 when r has no such subtree and h
/// parses. Throws SyntaxError when r does not parse.
double ast_match(std::string_view h, std::string_view r);

/// gate_names ∪ device_types ∪ measurement_returns. Throws SyntaxError.
std::set<std::string> dataflow_keys(std::string_view code);
/// Jaccard of the key sets; 1.0 when both are empty, 0 when h does not parse.
double dataflow_match(std::string_view h, std::string_view r);

double rouge_l(const std::vector<std::string>& h, const std::vector<std::string>& r);
double rouge_l(std::string_view h, std::string_view r);

struct CodeMetrics {
    double token_bleu = 0;
    double weighted_bleu = 0;
    double ast_match = 0;
    double dataflow_match = 0;
    double codebleu = 0;
    double rouge_l = 0;
};

/// All similarity metrics; codebleu is the mean of the first four.
CodeMetrics compute_metrics(std::string_view h, std::string_view r);

/// Fraction of challenges with a pass among their first k attempts. Throws
/// InsufficientAttempts when a challenge has fewer than k.
double pass_at_k(const std::vector<std::vector<bool>>& attempts, std::size_t k);

/// tests_passed / tests_total. Throws NoTests.
double partial_credit(const sandbox::ExecutionResult& result);

struct HallucinationStats {
    double rate = 0;
    std::size_t hallucinated = 0;
    std::size_t total = 0;
    std::string warning;
};

/// qml names outside the whitelist. Unparseable code is scanned lexically.
std::set<std::string> hallucinated_names(std::string_view code, const analyzer::Whitelist& wl);
/// Share of solutions with at least one hallucinated name; 0 with a warning
/// for an empty list.
HallucinationStats hallucination_rate(const std::vector<std::string>& solutions, const analyzer::Whitelist& wl);

}  // namespace qsynth::eval
