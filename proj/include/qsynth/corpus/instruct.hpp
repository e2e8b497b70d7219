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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qsynth/corpus/types.hpp"
#include "qsynth/llm/gateway.hpp"
#include "qsynth/retrieval/index.hpp"

namespace qsynth::corpus {

/// Words accepted as the leading action verb of an instruction.
class VerbLexicon {
public:
    /// One verb per line, '#' comments. Throws ValidationError if empty.
    static VerbLexicon parse(std::string_view text);
    static VerbLexicon load(const std::filesystem::path& path);
    static VerbLexicon builtin();

    bool contains(std::string_view word) const;
    std::size_t size() const { return verbs_.size(); }

private:
    std::set<std::string> verbs_;
};

struct InstructionLimits {
    std::size_t min_words = 20;
    std::size_t max_words = 40;
};

struct InstructionCheck {
    bool ok = false;
    std::size_t words = 0;
    bool starts_with_verb = false;
    std::string reason;
};

/// Word count is the number of alphanumeric runs; the first run, lowercased,
/// must be in the lexicon.
InstructionCheck check_instruction(std::string_view instruction, const VerbLexicon& verbs,
                                   const InstructionLimits& limits = {});

/// Fences, surrounding quotes and line breaks removed.
std::string normalize_instruction(std::string_view reply);

struct InstructionOptions {
    std::string prompt;  // contains {{code}}
    VerbLexicon verbs = VerbLexicon::builtin();
    InstructionLimits limits;
    llm::ChatRequest request_defaults;
    /// Extra attempts after the first invalid reply.
    int regenerations = 1;

    static InstructionOptions builtin();
    /// instruction_user.txt and verbs.txt in `dir` override the built-ins.
    static InstructionOptions load(const std::filesystem::path& dir);
};

struct GeneratedInstruction {
    std::string instruction;  // last reply, empty when the gateway failed
    int attempts = 0;
    bool flagged = false;
    std::string flag_reason;
    InstructionCheck check;
};

/// Asks for an instruction, regenerating once when it fails validation. Never
/// throws for gateway failures: the result is flagged as unpaired instead.
GeneratedInstruction generate_instruction(std::string_view code, llm::Gateway& gateway,
                                          const InstructionOptions& options = InstructionOptions::builtin());

/// Fills instruction and flag fields of verified entries. Code is never
/// modified. Throws ValidationError for rejected entries.
std::vector<InstructionPair> annotate(std::vector<InstructionPair> entries, llm::Gateway& gateway,
                                      const InstructionOptions& options, unsigned workers = 1);

struct ConsistencyResult {
    double top1 = 0;
    double top5 = 0;
    std::size_t queries = 0;
    std::vector<std::string> top1_misses;
};

/// Queries the knowledge base with every pair's instruction and reports how
/// often the pair itself is ranked first and within the first five. Pairs
/// without an instruction are skipped. Throws ValidationError unless the
/// index holds exactly these pairs.
ConsistencyResult consistency_check(const std::vector<InstructionPair>& pairs, const retrieval::KnowledgeBase& kb,
                                    const retrieval::EmbeddingProvider& provider);

}  // namespace qsynth::corpus
