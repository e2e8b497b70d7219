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

#include "qsynth/corpus/instruct.hpp"

#include <algorithm>

#include "qsynth/python/parser.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/parallel.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::corpus {

VerbLexicon VerbLexicon::parse(std::string_view t) {
    VerbLexicon v;
    for (const auto& raw : text::split_lines(t)) {
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        v.verbs_.insert(text::to_lower(line));
    }
    if (v.verbs_.empty()) throw ValidationError("verb lexicon is empty");
    return v;
}

VerbLexicon VerbLexicon::load(const std::filesystem::path& path) { return parse(io::read_file(path)); }

VerbLexicon VerbLexicon::builtin() { return parse(io::embedded_resource("verbs.txt")); }

bool VerbLexicon::contains(std::string_view word) const { return verbs_.count(text::to_lower(word)) > 0; }

InstructionCheck check_instruction(std::string_view instruction, const VerbLexicon& verbs, const InstructionLimits& limits) {
    InstructionCheck c;
    auto w = text::words(instruction);
    c.words = w.size();
    c.starts_with_verb = !w.empty() && verbs.contains(w.front());
    std::vector<std::string> problems;
    if (c.words < limits.min_words || c.words > limits.max_words)
        problems.push_back(std::to_string(c.words) + " words, expected " + std::to_string(limits.min_words) + "-" +
                           std::to_string(limits.max_words));
    if (!c.starts_with_verb) problems.push_back("does not start with an action verb");
    c.ok = problems.empty();
    c.reason = text::join(problems, "; ");
    return c;
}

std::string normalize_instruction(std::string_view reply) {
    std::string s = text::strip_quotes(text::strip_code_fences(reply));
    std::string out;
    bool space = false;
    for (char ch : s) {
        if (ch == '\n' || ch == '\r' || ch == '\t' || ch == ' ') {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(ch);
    }
    return out;
}

InstructionOptions InstructionOptions::builtin() { return load({}); }

InstructionOptions InstructionOptions::load(const std::filesystem::path& dir) {
    InstructionOptions o;
    o.prompt = text::trim(io::load_resource("prompts/instruction_user.txt", dir));
    o.verbs = VerbLexicon::parse(io::load_resource("verbs.txt", dir));
    return o;
}

GeneratedInstruction generate_instruction(std::string_view code, llm::Gateway& gateway, const InstructionOptions& options) {
    GeneratedInstruction g;
    llm::ChatRequest req = options.request_defaults;
    req.messages = {{"user", text::render(options.prompt, {{"code", std::string(code)}})}};
    int budget = 1 + std::max(0, options.regenerations);
    for (int i = 0; i < budget; ++i) {
        ++g.attempts;
        try {
            g.instruction = normalize_instruction(gateway.chat(req));
        } catch (const llm::GatewayError& e) {
            g.instruction.clear();
            g.flagged = true;
            g.flag_reason = std::string("unpaired: ") + e.what();
            g.check = {};
            return g;
        }
        g.check = check_instruction(g.instruction, options.verbs, options.limits);
        if (g.check.ok) return g;
    }
    g.flagged = true;
    g.flag_reason = "invalid instruction: " + g.check.reason;
    return g;
}

std::vector<InstructionPair> annotate(std::vector<InstructionPair> entries, llm::Gateway& gateway,
                                      const InstructionOptions& options, unsigned workers) {
    for (const auto& e : entries) {
        if (e.verdict == Verdict::Rejected) throw ValidationError("entry " + e.id + " was rejected by verification");
        if (!python::compiles(e.code)) throw ValidationError("entry " + e.id + " does not parse");
    }
    parallel_for(entries.size(), workers, [&](std::size_t i) {
        auto g = generate_instruction(entries[i].code, gateway, options);
        entries[i].instruction = g.instruction;
        entries[i].flagged = g.flagged;
        entries[i].flag_reason = g.flag_reason;
    });
    return entries;
}

ConsistencyResult consistency_check(const std::vector<InstructionPair>& pairs, const retrieval::KnowledgeBase& kb,
                                    const retrieval::EmbeddingProvider& provider) {
    std::vector<std::string> want;
    for (const auto& p : pairs) want.push_back(p.id);
    std::vector<std::string> have = kb.index().ids();
    std::sort(want.begin(), want.end());
    std::sort(have.begin(), have.end());
    if (want != have) throw ValidationError("index does not hold exactly the given pairs");

    ConsistencyResult r;
    std::size_t top1 = 0, top5 = 0;
    for (const auto& p : pairs) {
        if (text::trim(p.instruction).empty()) continue;
        ++r.queries;
        auto hits = kb.retrieve(p.instruction, provider, 5);
        for (std::size_t i = 0; i < hits.pairs.size(); ++i) {
            if (hits.pairs[i].pair->id != p.id) continue;
            if (i == 0) ++top1;
            ++top5;
            break;
        }
        if (hits.pairs.empty() || hits.pairs[0].pair->id != p.id) r.top1_misses.push_back(p.id);
    }
    if (r.queries) {
        r.top1 = static_cast<double>(top1) / static_cast<double>(r.queries);
        r.top5 = static_cast<double>(top5) / static_cast<double>(r.queries);
    }
    return r;
}

}  // namespace qsynth::corpus
