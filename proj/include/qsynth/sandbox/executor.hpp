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
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/rag/challenge.hpp"

namespace qsynth::sandbox {

enum class ExitKind { Ok, NonzeroExit, Timeout, LaunchFailure };

std::string_view to_string(ExitKind k);
ExitKind parse_exit_kind(std::string_view s);

struct TestOutcome {
    std::string name;
    bool passed = false;
    std::string message;
};

struct ExecutionResult {
    bool passed = false;
    std::size_t tests_total = 0;
    std::size_t tests_passed = 0;
    std::vector<TestOutcome> tests;
    /// False when no result line was produced, it listed no tests, or the
    /// solution failed to import because it does not parse.
    bool tests_loaded = false;
    std::string stdout_text;
    std::string stderr_text;
    double wall_time = 0;
    ExitKind exit_kind = ExitKind::LaunchFailure;
    int exit_code = -1;

    /// stderr plus the messages of failed tests, the text error rules match.
    std::string failure_text() const;
};

void to_json(nlohmann::json& j, const ExecutionResult& r);
void from_json(const nlohmann::json& j, ExecutionResult& r);

/// Parses the shim's result line: the last stdout line that is a JSON object
/// with a "tests" array. nullopt if there is none.
std::optional<std::vector<TestOutcome>> parse_shim_output(std::string_view stdout_text);

/// Fills counts, tests_loaded and passed from `tests` and `exit_kind`.
void finalize(ExecutionResult& r, std::optional<std::vector<TestOutcome>> tests);

class Executor {
public:
    virtual ~Executor() = default;
    /// `limit` defaults to the executor's configured wall-clock limit.
    virtual ExecutionResult execute(std::string_view code, const rag::ChallengeTask& task,
                                    std::optional<std::chrono::duration<double>> limit = std::nullopt) = 0;
};

struct SubprocessOptions {
    std::string python = "python3";
    std::filesystem::path shim_path;
    std::chrono::duration<double> default_limit = std::chrono::seconds(60);
    std::size_t output_cap = 64 * 1024;
    unsigned max_concurrent = 4;
    std::filesystem::path temp_root;  // empty: system temp directory
    bool keep_workspace = false;
};

/// Runs `python shim <workspace> tests.py` in a fresh temporary workspace that
/// holds solution.py, tests.py and meta.json. The process runs in its own
/// process group, which is killed when the limit expires.
class SubprocessExecutor : public Executor {
public:
    explicit SubprocessExecutor(SubprocessOptions options);

    ExecutionResult execute(std::string_view code, const rag::ChallengeTask& task,
                            std::optional<std::chrono::duration<double>> limit = std::nullopt) override;

    const SubprocessOptions& options() const { return options_; }
    /// Workspace of the most recent execution when keep_workspace is set.
    std::filesystem::path last_workspace() const;

private:
    ExecutionResult run(const std::filesystem::path& workspace, std::chrono::duration<double> limit);

    SubprocessOptions options_;
    std::counting_semaphore<1024> slots_;
    mutable std::mutex mu_;
    std::filesystem::path last_workspace_;
};

}  // namespace qsynth::sandbox
