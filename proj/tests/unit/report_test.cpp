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

#include <gtest/gtest.h>

#include "qsynth/eval/report.hpp"

namespace qsynth::eval {
namespace {

using nlohmann::json;

json row(const std::string& id, int run, bool pass, const json& code, int passed, int total,
         const std::string& category = "") {
    json exec = nullptr;
    if (total >= 0)
        exec = {{"passed", pass},           {"tests_total", total}, {"tests_passed", passed}, {"tests", json::array()},
                {"tests_loaded", total > 0}, {"stdout", ""},         {"stderr", ""},           {"wall_time", 0.1},
                {"exit_kind", "ok"},         {"exit_code", 0}};
    return {{"challenge_id", id},
            {"run", run},
            {"final_pass", pass},
            {"final_category", category.empty() ? (pass ? "none" : "reasoning_error") : category},
            {"attempts", json::array({{{"iteration", 0}, {"response", ""}, {"code", code}, {"execution", exec}}})}};
}

const char* kRef = "def f(x):\n    return x + 1\n";

TEST(Report, ParsesTraceRow) {
    auto t = parse_trace(row("c1", 2, false, "def f(x):\n    return x\n", 1, 4));
    EXPECT_EQ(t.challenge_id, "c1");
    EXPECT_EQ(t.run, 2);
    ASSERT_TRUE(t.code);
    ASSERT_TRUE(t.execution);
    EXPECT_EQ(t.execution->tests_passed, 1u);
    EXPECT_EQ(t.category, sandbox::ErrorCategory::ReasoningError);
    EXPECT_THROW(parse_trace(json{{"final_pass", true}}), ValidationError);
}

TEST(Report, AggregatesRunsAndMetrics) {
    std::vector<TraceRun> runs;
    // c1 passes only on its second run; c2 never; each has two runs.
    runs.push_back(parse_trace(row("c1", 1, true, kRef, 2, 2)));
    runs.push_back(parse_trace(row("c1", 0, false, "def f(x):\n    return x\n", 1, 2)));
    runs.push_back(parse_trace(row("c2", 0, false, nullptr, 0, -1, "formatting_failure")));
    runs.push_back(parse_trace(row("c2", 1, false, "import pennylane as qml\nqml.NoSuchGate(wires=0)\n", 0, 3,
                                   "hallucination")));
    auto rep = evaluate(runs, {{"c1", kRef}}, analyzer::Whitelist::builtin(), 2);
    ASSERT_EQ(rep.challenges.size(), 2u);
    EXPECT_EQ(rep.challenges[0].id, "c1");
    EXPECT_EQ(rep.challenges[0].passes, 1u);
    EXPECT_DOUBLE_EQ(rep.pass_at_1, 0.0);
    EXPECT_DOUBLE_EQ(rep.pass_at_k, 0.5);
    EXPECT_EQ(rep.k, 2u);
    EXPECT_DOUBLE_EQ(rep.challenges[0].partial_credit, 0.75);
    EXPECT_DOUBLE_EQ(rep.challenges[1].partial_credit, 0.0);
    EXPECT_DOUBLE_EQ(rep.partial_credit, 0.375);
    ASSERT_TRUE(rep.challenges[0].metrics);
    EXPECT_FALSE(rep.challenges[1].metrics);
    EXPECT_EQ(rep.metric_challenges, 1u);
    auto expect = compute_metrics("def f(x):\n    return x\n", kRef);
    EXPECT_NEAR(rep.mean_metrics.codebleu, (1.0 + expect.codebleu) / 2, 1e-12);
    EXPECT_EQ(rep.hallucination.hallucinated, 1u);
    EXPECT_EQ(rep.hallucination.total, 3u);
    EXPECT_EQ(rep.categories.at("formatting_failure"), 1u);
    EXPECT_EQ(rep.categories.at("none"), 1u);

    auto j = rep.to_json();
    EXPECT_EQ(j["aggregate"]["pass_at_k"], 0.5);
    EXPECT_NE(rep.table().find("CB     RL     AST    DF"), std::string::npos);
}

TEST(Report, ReducesKWithWarning) {
    std::vector<TraceRun> runs = {parse_trace(row("a", 0, true, kRef, 1, 1))};
    auto rep = evaluate(runs, {}, analyzer::Whitelist::builtin(), 5);
    EXPECT_EQ(rep.k, 1u);
    EXPECT_DOUBLE_EQ(rep.pass_at_k, 1.0);
    EXPECT_FALSE(rep.warnings.empty());
}

TEST(Report, EmptyTrace) {
    auto rep = evaluate({}, {}, analyzer::Whitelist::builtin(), 5);
    EXPECT_TRUE(rep.challenges.empty());
    EXPECT_FALSE(rep.warnings.empty());
}

}  // namespace
}  // namespace qsynth::eval
