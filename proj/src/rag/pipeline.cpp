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

#include "qsynth/rag/pipeline.hpp"

#include <cstdio>

#include "qsynth/python/parser.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/parallel.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::rag {

using sandbox::ErrorCategory;

void PipelineConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must be in [0, 1]");
    if (k < 1) throw ValidationError("k must be at least 1");
    if (max_fixes < 0) throw ValidationError("max fixes must be non-negative");
    if (execution_limit.count() <= 0) throw ValidationError("execution limit must be positive");
    if (temperature < 0) throw ValidationError("temperature must be non-negative");
    if (max_tokens <= 0) throw ValidationError("max tokens must be positive");
}

llm::ChatRequest PipelineConfig::request() const {
    llm::ChatRequest r;
    r.temperature = temperature;
    r.max_tokens = max_tokens;
    r.model_id = model_id;
    return r;
}

PromptTemplates PromptTemplates::builtin() { return load({}); }

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
    auto get = [&](const char* name) { return text::trim(io::load_resource(std::string("prompts/") + name, dir)); };
    return {get("solve_system.txt"), get("expand_query.txt"), get("base_prompt.txt"),
            get("rag_prompt.txt"),   get("rag_example.txt"),  get("fix_prompt.txt")};
}

std::string_view to_string(PromptKind k) { return k == PromptKind::Rag ? "rag" : "base"; }

std::string expand_query(const ChallengeTask& task, llm::Gateway& gateway, const PromptTemplates& templates,
                         const llm::ChatRequest& defaults) {
    if (text::trim(task.description).empty()) throw ValidationError("challenge " + task.id + " has an empty description");
    llm::ChatRequest req = defaults;
    req.messages = {{"user", text::render(templates.expand, {{"description", task.description}})}};
    try {
        auto q = text::trim(text::strip_code_fences(gateway.chat(req)));
        return q.empty() ? task.description : q;
    } catch (const llm::GatewayError&) {
        return task.description;
    }
}

namespace {

std::string score_text(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

std::string render_examples(const retrieval::Retrieval& retrieved, const PromptTemplates& templates) {
    std::vector<std::string> parts;
    int rank = 1;
    for (const auto& rp : retrieved.pairs) {
        parts.push_back(text::render(templates.example, {{"rank", std::to_string(rank++)},
                                                         {"score", score_text(rp.score)},
                                                         {"instruction", rp.pair->instruction},
                                                         {"code", text::trim(rp.pair->code)}}));
    }
    return text::join(parts, "\n\n");
}

}  // namespace

Prompt build_prompt(const ChallengeTask& task, const retrieval::Retrieval& retrieved, const PipelineConfig& cfg,
                    const PromptTemplates& templates) {
    Prompt p;
    p.system = templates.system;
    std::map<std::string, std::string> vars = {{"description", text::trim(task.description)},
                                               {"template", text::trim(task.template_code)}};
    if (retrieved.pairs.empty() || retrieved.max_score < cfg.tau) {
        p.kind = PromptKind::Base;
        p.user = text::render(templates.base, vars);
        return p;
    }
    p.kind = PromptKind::Rag;
    vars["examples"] = render_examples(retrieved, templates);
    p.user = text::render(templates.rag, vars);
    return p;
}

namespace {

struct Fence {
    std::string tag;
    std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view response) {
    std::vector<Fence> out;
    auto lines = text::split_lines(response);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto open = text::trim(lines[i]);
        if (open.rfind("```", 0) != 0) continue;
        std::string tag = text::to_lower(text::trim(open.substr(3)));
        std::vector<std::string> body;
        std::size_t j = i + 1;
        for (; j < lines.size(); ++j) {
            if (text::trim(lines[j]) == "```") break;
            body.push_back(lines[j]);
        }
        if (j == lines.size()) break;  // unterminated
        out.push_back({tag, text::join(body, "\n") + "\n"});
        i = j;
    }
    return out;
}

bool python_tag(const std::string& tag) { return tag == "python" || tag == "py" || tag == "python3"; }

}  // namespace

std::string extract_code(std::string_view response) {
    auto blocks = fenced_blocks(response);
    std::optional<std::string> chosen;
    for (const auto& b : blocks)
        if (python_tag(b.tag)) {
            chosen = b.body;
            break;
        }
    if (!chosen && !blocks.empty()) {
        const Fence* largest = &blocks.front();
        for (const auto& b : blocks)
            if (b.body.size() > largest->body.size()) largest = &b;
        chosen = largest->body;
    }
    if (!chosen) chosen = text::trim(response) + "\n";
    if (text::trim(*chosen).empty()) throw FormatError("response contains no code");
    if (auto err = python::compile_error(*chosen)) throw FormatError("extracted code does not parse: " + *err);
    return *chosen;
}

std::string execution_feedback(const sandbox::ExecutionResult& r) {
    std::vector<std::string> lines;
    switch (r.exit_kind) {
        case sandbox::ExitKind::Timeout: lines.push_back("Execution timed out."); break;
        case sandbox::ExitKind::LaunchFailure: lines.push_back("The test harness could not be started."); break;
        default: break;
    }
    if (r.tests_total > 0)
        lines.push_back("Tests passed: " + std::to_string(r.tests_passed) + "/" + std::to_string(r.tests_total));
    for (const auto& t : r.tests)
        if (!t.passed) lines.push_back("FAILED " + t.name + (t.message.empty() ? "" : ": " + t.message));
    auto err = text::trim(r.stderr_text);
    if (!err.empty()) {
        constexpr std::size_t kTail = 2000;
        if (err.size() > kTail) err = "..." + err.substr(err.size() - kTail);
        lines.push_back("stderr:\n" + err);
    }
    if (lines.empty()) lines.push_back("No test results were produced.");
    return text::join(lines, "\n");
}

ErrorCategory SolveOutcome::final_category() const {
    if (final_pass) return ErrorCategory::None;
    auto* a = final_attempt();
    return a ? a->category : ErrorCategory::FormattingFailure;
}

const GenerationAttempt* SolveOutcome::final_attempt() const { return attempts.empty() ? nullptr : &attempts.back(); }

nlohmann::json SolveOutcome::to_json() const {
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& h : hits) hs.push_back({{"id", h.id}, {"score", h.score}});
    nlohmann::json as = nlohmann::json::array();
    for (const auto& a : attempts) {
        nlohmann::json aj = {{"iteration", a.iteration},
                             {"response", a.response},
                             {"code", a.code ? nlohmann::json(*a.code) : nlohmann::json(nullptr)},
                             {"category", sandbox::to_string(a.category)}};
        if (!a.format_error.empty()) aj["format_error"] = a.format_error;
        aj["execution"] = a.execution ? nlohmann::json(*a.execution) : nlohmann::json(nullptr);
        as.push_back(aj);
    }
    nlohmann::json j = {{"challenge_id", challenge_id},
                        {"expanded_query", expanded_query},
                        {"retrieval", {{"hits", hs}, {"max_score", hits.empty() ? nlohmann::json(nullptr) : nlohmann::json(max_score)}}},
                        {"prompt_kind", to_string(prompt_kind)},
                        {"attempts", as},
                        {"final_pass", final_pass},
                        {"final_category", sandbox::to_string(final_category())}};
    if (!error.empty()) j["error"] = error;
    return j;
}

namespace {

GenerationAttempt attempt(int iteration, const Prompt& prompt, const ChallengeTask& task, const SolveContext& ctx,
                          const PipelineConfig& cfg) {
    GenerationAttempt a;
    a.iteration = iteration;
    llm::ChatRequest req = cfg.request();
    if (!prompt.system.empty()) req.messages.push_back({"system", prompt.system});
    req.messages.push_back({"user", prompt.user});
    a.response = ctx.gateway->chat(req);
    try {
        a.code = extract_code(a.response);
    } catch (const FormatError& e) {
        a.format_error = e.what();
        a.category = ErrorCategory::FormattingFailure;
        return a;
    }
    a.execution = ctx.executor->execute(*a.code, task, cfg.execution_limit);
    a.category = sandbox::classify_error(*a.execution, std::string_view(*a.code), *ctx.whitelist, *ctx.rules);
    return a;
}

Prompt fix_prompt(const ChallengeTask& task, const GenerationAttempt& prev, const Prompt& first,
                  const retrieval::Retrieval& retrieved, const PromptTemplates& templates) {
    Prompt p;
    p.kind = first.kind;
    p.system = first.system;
    std::string feedback = prev.execution ? execution_feedback(*prev.execution)
                                          : "Your response did not contain a parseable Python code block: " + prev.format_error;
    std::string examples;
    if (first.kind == PromptKind::Rag)
        examples = "\nRetrieved examples:\n\n" + render_examples(retrieved, templates) + "\n\n" +
                   std::string(kSelectiveContextSentence) + "\n";
    p.user = text::render(templates.fix, {{"description", text::trim(task.description)},
                                          {"template", text::trim(task.template_code)},
                                          {"previous_code", text::trim(prev.code ? *prev.code : prev.response)},
                                          {"feedback", feedback},
                                          {"examples_section", examples}});
    return p;
}

}  // namespace

SolveOutcome solve(const ChallengeTask& task, const SolveContext& ctx, const PipelineConfig& cfg) {
    cfg.validate();
    task.validate();
    if (!ctx.gateway || !ctx.executor || !ctx.whitelist || !ctx.rules)
        throw ValidationError("solve needs a gateway, an executor, a whitelist and classifier rules");
    SolveOutcome out;
    out.challenge_id = task.id;
    out.expanded_query = task.description;

    retrieval::Retrieval retrieved;
    bool can_retrieve = cfg.retrieval && ctx.knowledge && ctx.embedder && !ctx.knowledge->index().empty();
    if (cfg.retrieval && cfg.expand) out.expanded_query = expand_query(task, *ctx.gateway, ctx.templates, cfg.request());
    if (can_retrieve) {
        retrieved = ctx.knowledge->retrieve(out.expanded_query, *ctx.embedder, cfg.k);
        for (const auto& rp : retrieved.pairs) out.hits.push_back({rp.pair->id, rp.score});
        out.max_score = retrieved.max_score;
    }
    Prompt first = build_prompt(task, retrieved, cfg, ctx.templates);
    out.prompt_kind = first.kind;

    try {
        out.attempts.push_back(attempt(0, first, task, ctx, cfg));
        for (int t = 1; t <= cfg.max_fixes && !out.attempts.back().passed(); ++t)
            out.attempts.push_back(attempt(t, fix_prompt(task, out.attempts.back(), first, retrieved, ctx.templates), task, ctx, cfg));
    } catch (const llm::GatewayError& e) {
        out.error = e.what();
    }
    out.final_pass = !out.attempts.empty() && out.attempts.back().passed();
    return out;
}

std::vector<SolveOutcome> solve_all(const std::vector<ChallengeTask>& tasks, const SolveContext& ctx,
                                    const PipelineConfig& cfg, unsigned workers) {
    std::vector<SolveOutcome> out(tasks.size());
    parallel_for(tasks.size(), workers, [&](std::size_t i) { out[i] = solve(tasks[i], ctx, cfg); });
    return out;
}

}  // namespace qsynth::rag
