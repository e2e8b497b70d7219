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

#include "qsynth/sandbox/classify.hpp"

#include "qsynth/analyzer/features.hpp"
#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::sandbox {

std::string_view to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::None: return "none";
        case ErrorCategory::FormattingFailure: return "formatting_failure";
        case ErrorCategory::Hallucination: return "hallucination";
        case ErrorCategory::ApiMisuse: return "api_misuse";
        case ErrorCategory::ReasoningError: return "reasoning_error";
        case ErrorCategory::Timeout: return "timeout";
    }
    return "none";
}

ErrorCategory parse_error_category(std::string_view s) {
    for (auto c : {ErrorCategory::None, ErrorCategory::FormattingFailure, ErrorCategory::Hallucination,
                   ErrorCategory::ApiMisuse, ErrorCategory::ReasoningError, ErrorCategory::Timeout})
        if (to_string(c) == s) return c;
    throw ValidationError("unknown error category '" + std::string(s) + "'");
}

ClassifierRules ClassifierRules::parse(std::string_view t) {
    ClassifierRules rules;
    int lineno = 0;
    for (const auto& raw : text::split_lines(t)) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto sp = line.find_first_of(" \t");
        if (sp == std::string::npos) throw ValidationError("rule line " + std::to_string(lineno) + " has no pattern");
        auto cat = parse_error_category(line.substr(0, sp));
        if (cat != ErrorCategory::Hallucination && cat != ErrorCategory::ApiMisuse && cat != ErrorCategory::ReasoningError)
            throw ValidationError("rule line " + std::to_string(lineno) + ": category " + std::string(to_string(cat)) +
                                  " cannot be matched from text");
        auto pattern = text::trim(line.substr(sp));
        try {
            rules.rules_.push_back({cat, pattern, std::regex(pattern, std::regex::ECMAScript)});
        } catch (const std::regex_error& e) {
            throw ValidationError("rule line " + std::to_string(lineno) + ": bad regex: " + e.what());
        }
    }
    if (rules.rules_.empty()) throw ValidationError("classifier rules are empty");
    return rules;
}

ClassifierRules ClassifierRules::load(const std::filesystem::path& path) { return parse(io::read_file(path)); }

ClassifierRules ClassifierRules::builtin() {
    static const ClassifierRules rules = parse(io::embedded_resource("classifier_rules.txt"));
    return rules;
}

bool ClassifierRules::matches(ErrorCategory category, std::string_view t) const {
    auto lines = text::split_lines(t);
    for (const auto& rule : rules_) {
        if (rule.category != category) continue;
        for (const auto& line : lines)
            if (std::regex_search(line, rule.pattern)) return true;
    }
    return false;
}

ErrorCategory classify_error(const ExecutionResult& result, std::optional<std::string_view> code,
                             const analyzer::Whitelist& whitelist, const ClassifierRules& rules) {
    if (result.passed) return ErrorCategory::None;
    if (result.exit_kind == ExitKind::Timeout) return ErrorCategory::Timeout;
    if (!code || !result.tests_loaded) return ErrorCategory::FormattingFailure;
    try {
        if (!analyzer::whitelist_violations(analyzer::extract_features(*code), whitelist).empty())
            return ErrorCategory::Hallucination;
    } catch (const SyntaxError&) {
        return ErrorCategory::FormattingFailure;
    }
    auto text = result.failure_text();
    if (rules.matches(ErrorCategory::Hallucination, text)) return ErrorCategory::Hallucination;
    if (rules.matches(ErrorCategory::ApiMisuse, text)) return ErrorCategory::ApiMisuse;
    return ErrorCategory::ReasoningError;
}

}  // namespace qsynth::sandbox
