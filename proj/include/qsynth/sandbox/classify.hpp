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

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "qsynth/analyzer/whitelist.hpp"
#include "qsynth/sandbox/executor.hpp"

namespace qsynth::sandbox {

enum class ErrorCategory { None, FormattingFailure, Hallucination, ApiMisuse, ReasoningError, Timeout };

std::string_view to_string(ErrorCategory c);
ErrorCategory parse_error_category(std::string_view s);

/// Failure categories in report order.
inline constexpr ErrorCategory kFailureCategories[] = {ErrorCategory::FormattingFailure, ErrorCategory::Hallucination,
                                                       ErrorCategory::ReasoningError, ErrorCategory::ApiMisuse,
                                                       ErrorCategory::Timeout};

/// Line-anchored regex rules mapping error text to a category.
class ClassifierRules {
public:
    /// Lines `<category> <regex>`; '#' comments. Only hallucination, api_misuse
    /// and reasoning_error are accepted. Throws ValidationError.
    static ClassifierRules parse(std::string_view text);
    static ClassifierRules load(const std::filesystem::path& path);
    static ClassifierRules builtin();

    /// True if any line of `text` matches a rule of `category`.
    bool matches(ErrorCategory category, std::string_view text) const;
    std::size_t size() const { return rules_.size(); }

private:
    struct Rule {
        ErrorCategory category;
        std::string source;
        std::regex pattern;
    };
    std::vector<Rule> rules_;
};

/// First matching rule wins:
///   timeout            the execution hit the wall-clock limit
///   formatting_failure no code could be extracted (`code` is nullopt) or the
///                      tests never loaded
///   hallucination      the code calls qml names outside the whitelist, or the
///                      error text matches a hallucination rule
///   api_misuse         the error text matches an api_misuse rule
///   reasoning_error    any other failure
/// A passed result is none.
ErrorCategory classify_error(const ExecutionResult& result, std::optional<std::string_view> code,
                             const analyzer::Whitelist& whitelist, const ClassifierRules& rules = ClassifierRules::builtin());

}  // namespace qsynth::sandbox
