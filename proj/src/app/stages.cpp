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

#include "qsynth/app/stages.hpp"

#include <mutex>

#include "qsynth/corpus/instruct.hpp"
#include "qsynth/corpus/profile.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/parallel.hpp"

namespace qsynth::app {

using nlohmann::json;

namespace {

template <typename T>
std::vector<T> read_rows(const std::filesystem::path& path) {
    std::vector<T> out;
    std::size_t line = 0;
    for (const auto& row : io::read_jsonl(path)) {
        ++line;
        try {
            out.push_back(row.get<T>());
        } catch (const json::exception& e) {
            throw ValidationError(path.string() + ": row " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

template <typename T>
std::vector<json> rows(const std::vector<T>& v) {
    std::vector<json> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x);
    return out;
}

template <typename T>
json composition_of(const std::vector<T>& v) {
    std::vector<corpus::SourceCategory> cats;
    for (const auto& x : v) cats.push_back(x.category);
    return corpus::composition(cats).to_json();
}

}  // namespace

std::vector<json> to_rows(const std::vector<corpus::ExtractedFunction>& v) { return rows(v); }
std::vector<json> to_rows(const std::vector<corpus::InstructionPair>& v) { return rows(v); }
std::vector<corpus::ExtractedFunction> read_functions(const std::filesystem::path& p) {
    return read_rows<corpus::ExtractedFunction>(p);
}
std::vector<corpus::InstructionPair> read_pairs(const std::filesystem::path& p) { return read_rows<corpus::InstructionPair>(p); }

StageOutput<corpus::ExtractedFunction> run_extract(const std::vector<corpus::SourceRecord>& records, const Config& cfg) {
    StageOutput<corpus::ExtractedFunction> out;
    std::mutex mu;
    auto result = corpus::extract_all(records, cfg.effective_workers(), [&](const corpus::ParseFailure& f) {
        std::lock_guard<std::mutex> lock(mu);
        out.warnings.push_back(std::string("skipped unparseable file ") + f.what());
    });
    std::sort(out.warnings.begin(), out.warnings.end());
    out.items = result.retained();
    out.stats = result.stats.to_json();
    out.stats["composition"] = composition_of(out.items);
    std::vector<corpus::SourceCategory> sources;
    for (const auto& r : records) sources.push_back(r.category);
    out.stats["source_composition"] = corpus::composition(sources).to_json();
    return out;
}

VerifyOutput run_verify(const std::vector<corpus::ExtractedFunction>& functions, llm::Gateway* gateway, const Config& cfg) {
    corpus::Stage2Options opts;
    opts.modernize = cfg.modernize && gateway;
    opts.only_deprecated = cfg.only_deprecated;
    opts.thresholds = cfg.thresholds;
    opts.prompts = corpus::ModernizePrompts::load(cfg.resources_dir);
    opts.request_defaults = cfg.rag.request();

    std::vector<corpus::Stage2Outcome> outcomes(functions.size());
    parallel_for(functions.size(), cfg.effective_workers(),
                 [&](std::size_t i) { outcomes[i] = corpus::process(functions[i], gateway, opts); });

    VerifyOutput out;
    std::map<std::string, std::size_t> verdicts;
    std::size_t attempted = 0, gateway_errors = 0, fallbacks = 0;
    for (const auto& o : outcomes) {
        ++verdicts[std::string(corpus::to_string(o.report.verdict))];
        attempted += o.modernization_attempted;
        fallbacks += o.report.fallback_applied;
        json r = {{"id", o.entry.id}, {"report", o.report.to_json()}, {"modernization_attempted", o.modernization_attempted}};
        if (!o.gateway_error.empty()) {
            ++gateway_errors;
            r["gateway_error"] = o.gateway_error;
            out.warnings.push_back(o.entry.id + ": modernization failed: " + o.gateway_error);
        }
        out.reports.push_back(std::move(r));
        if (o.report.verdict != corpus::Verdict::Rejected) out.items.push_back(o.entry);
    }
    out.partial = gateway_errors > 0;
    out.stats = {{"input", functions.size()},
                 {"retained", out.items.size()},
                 {"verdicts", verdicts},
                 {"modernization_attempted", attempted},
                 {"fallback_applied", fallbacks},
                 {"gateway_errors", gateway_errors},
                 {"composition", composition_of(out.items)}};
    return out;
}

DedupOutput run_dedup(const std::vector<corpus::InstructionPair>& entries, const Config& cfg) {
    std::vector<corpus::DedupItem> items;
    for (const auto& e : entries) items.push_back({e.id, e.code});
    corpus::DedupOptions o;
    o.threshold = cfg.dedup_threshold;
    o.seed = cfg.seed;
    o.bands = cfg.dedup_bands;
    o.rows = cfg.dedup_rows;
    o.workers = cfg.effective_workers();
    auto r = corpus::dedup(items, o);
    DedupOutput out;
    for (auto i : r.retained) out.items.push_back(entries[i]);
    out.duplicates = r.duplicates;
    out.stats = {{"input", entries.size()},
                 {"retained", out.items.size()},
                 {"removed", r.duplicates.size()},
                 {"candidate_pairs", r.candidate_pairs},
                 {"threshold", o.threshold},
                 {"seed", o.seed},
                 {"composition", composition_of(out.items)}};
    return out;
}

StageOutput<corpus::InstructionPair> run_instruct(const std::vector<corpus::InstructionPair>& entries, llm::Gateway& gateway,
                                                  const Config& cfg) {
    auto opts = corpus::InstructionOptions::load(cfg.resources_dir);
    opts.limits = cfg.instruction_limits;
    opts.regenerations = cfg.regenerations;
    opts.request_defaults = cfg.rag.request();
    StageOutput<corpus::InstructionPair> out;
    out.items = corpus::annotate(entries, gateway, opts, cfg.effective_workers());
    std::size_t flagged = 0, unpaired = 0;
    for (const auto& p : out.items) {
        if (!p.flagged) continue;
        ++flagged;
        if (p.instruction.empty()) {
            ++unpaired;
            out.warnings.push_back(p.id + ": " + p.flag_reason);
        }
    }
    out.partial = unpaired > 0;
    out.stats = {{"input", entries.size()},
                 {"paired", out.items.size() - unpaired},
                 {"flagged", flagged},
                 {"unpaired", unpaired},
                 {"composition", composition_of(out.items)}};
    return out;
}

}  // namespace qsynth::app
