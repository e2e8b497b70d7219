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

#include "qsynth/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "qsynth/util/parallel.hpp"

namespace qsynth::eval {

using nlohmann::json;

TraceRun parse_trace(const json& row) {
    TraceRun t;
    try {
        t.challenge_id = row.at("challenge_id").get<std::string>();
        t.passed = row.at("final_pass").get<bool>();
        t.category = sandbox::parse_error_category(row.at("final_category").get<std::string>());
        t.run = row.value("run", 0);
        const auto& attempts = row.at("attempts");
        if (!attempts.is_array()) throw ValidationError("attempts is not an array");
        if (!attempts.empty()) {
            const auto& last = attempts.back();
            if (last.contains("code") && last["code"].is_string()) t.code = last["code"].get<std::string>();
            if (last.contains("execution") && last["execution"].is_object())
                t.execution = last["execution"].get<sandbox::ExecutionResult>();
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad trace row: ") + e.what());
    }
    if (t.challenge_id.empty()) throw ValidationError("trace row without challenge_id");
    return t;
}

namespace {

json metrics_json(const CodeMetrics& m) {
    return {{"codebleu", m.codebleu},   {"token_bleu", m.token_bleu}, {"weighted_bleu", m.weighted_bleu},
            {"ast_match", m.ast_match}, {"dataflow_match", m.dataflow_match}, {"rouge_l", m.rouge_l}};
}

void accumulate(CodeMetrics& sum, const CodeMetrics& m) {
    sum.token_bleu += m.token_bleu;
    sum.weighted_bleu += m.weighted_bleu;
    sum.ast_match += m.ast_match;
    sum.dataflow_match += m.dataflow_match;
    sum.codebleu += m.codebleu;
    sum.rouge_l += m.rouge_l;
}

CodeMetrics scaled(CodeMetrics m, double f) {
    m.token_bleu *= f;
    m.weighted_bleu *= f;
    m.ast_match *= f;
    m.dataflow_match *= f;
    m.codebleu *= f;
    m.rouge_l *= f;
    return m;
}

CodeMetrics run_metrics(const TraceRun& r, const std::string& reference) {
    if (!r.code) return {};
    try {
        return compute_metrics(*r.code, reference);
    } catch (const EmptyInput&) {
        return {};
    }
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

EvalReport evaluate(const std::vector<TraceRun>& runs, const std::map<std::string, std::string>& references,
                    const analyzer::Whitelist& whitelist, std::size_t k, unsigned workers) {
    if (k == 0) throw ValidationError("k must be positive");
    std::vector<std::string> order;
    std::map<std::string, std::vector<const TraceRun*>> groups;
    for (const auto& r : runs) {
        auto [it, fresh] = groups.try_emplace(r.challenge_id);
        if (fresh) order.push_back(r.challenge_id);
        it->second.push_back(&r);
    }
    for (auto& [id, g] : groups)
        std::stable_sort(g.begin(), g.end(), [](const TraceRun* a, const TraceRun* b) { return a->run < b->run; });

    EvalReport rep;
    rep.challenges.resize(order.size());
    parallel_for(order.size(), workers, [&](std::size_t i) {
        const auto& g = groups.at(order[i]);
        ChallengeReport& c = rep.challenges[i];
        c.id = order[i];
        c.runs = g.size();
        auto ref = references.find(c.id);
        CodeMetrics sum;
        for (const TraceRun* r : g) {
            c.passes += r->passed;
            ++c.categories[std::string(sandbox::to_string(r->category))];
            if (r->execution && r->execution->tests_total > 0) c.partial_credit += partial_credit(*r->execution);
            if (ref != references.end()) accumulate(sum, run_metrics(*r, ref->second));
        }
        c.partial_credit /= static_cast<double>(c.runs);
        if (ref != references.end()) c.metrics = scaled(sum, 1.0 / static_cast<double>(c.runs));
    });

    if (rep.challenges.empty()) {
        rep.warnings.push_back("no trace rows");
        rep.hallucination = hallucination_rate({}, whitelist);
        return rep;
    }

    std::size_t min_runs = rep.challenges.front().runs;
    for (const auto& c : rep.challenges) min_runs = std::min(min_runs, c.runs);
    rep.k = std::min(k, min_runs);
    if (rep.k < k)
        rep.warnings.push_back("pass@" + std::to_string(k) + " needs " + std::to_string(k) +
                               " runs per challenge; reporting pass@" + std::to_string(rep.k));
    std::vector<std::vector<bool>> matrix;
    for (const auto& id : order) {
        std::vector<bool> row;
        for (const TraceRun* r : groups.at(id)) row.push_back(r->passed);
        matrix.push_back(std::move(row));
    }
    rep.pass_at_1 = pass_at_k(matrix, 1);
    rep.pass_at_k = pass_at_k(matrix, rep.k);

    CodeMetrics sum;
    for (const auto& c : rep.challenges) {
        rep.partial_credit += c.partial_credit;
        for (const auto& [cat, n] : c.categories) rep.categories[cat] += n;
        if (c.metrics) {
            accumulate(sum, *c.metrics);
            ++rep.metric_challenges;
        }
    }
    rep.partial_credit /= static_cast<double>(rep.challenges.size());
    if (rep.metric_challenges) rep.mean_metrics = scaled(sum, 1.0 / static_cast<double>(rep.metric_challenges));
    else rep.warnings.push_back("no reference solutions; similarity metrics not computed");

    std::vector<std::string> solutions;
    for (const auto& r : runs)
        if (r.code) solutions.push_back(*r.code);
    rep.hallucination = hallucination_rate(solutions, whitelist);
    if (!rep.hallucination.warning.empty()) rep.warnings.push_back(rep.hallucination.warning);
    return rep;
}

json EvalReport::to_json() const {
    json rows = json::array();
    for (const auto& c : challenges) {
        json r = {{"id", c.id},
                  {"runs", c.runs},
                  {"passes", c.passes},
                  {"partial_credit", c.partial_credit},
                  {"categories", c.categories},
                  {"metrics", c.metrics ? metrics_json(*c.metrics) : json(nullptr)}};
        rows.push_back(r);
    }
    return {{"challenges", rows},
            {"aggregate",
             {{"challenges", challenges.size()},
              {"k", k},
              {"pass_at_1", pass_at_1},
              {"pass_at_k", pass_at_k},
              {"partial_credit", partial_credit},
              {"metrics", metric_challenges ? metrics_json(mean_metrics) : json(nullptr)},
              {"metric_challenges", metric_challenges},
              {"hallucination_rate", hallucination.rate},
              {"hallucinated_solutions", hallucination.hallucinated},
              {"checked_solutions", hallucination.total},
              {"categories", categories}}},
            {"warnings", warnings}};
}

std::string EvalReport::table() const {
    std::size_t w = 9;
    for (const auto& c : challenges) w = std::max(w, c.id.size());
    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t n) { return s + std::string(n > s.size() ? n - s.size() : 0, ' '); };
    out << pad("challenge", w) << "  runs  pass  CB     RL     AST    DF     PC\n";
    auto metric_cols = [&](const std::optional<CodeMetrics>& m) {
        if (!m) return std::string("-      -      -      -      ");
        return fixed(m->codebleu) + "  " + fixed(m->rouge_l) + "  " + fixed(m->ast_match) + "  " + fixed(m->dataflow_match) + "  ";
    };
    for (const auto& c : challenges)
        out << pad(c.id, w) << "  " << pad(std::to_string(c.runs), 4) << "  " << pad(std::to_string(c.passes), 4) << "  "
            << metric_cols(c.metrics) << fixed(c.partial_credit) << "\n";
    out << pad("mean", w) << "  " << pad("", 4) << "  " << pad("", 4) << "  "
        << metric_cols(metric_challenges ? std::optional<CodeMetrics>(mean_metrics) : std::nullopt) << fixed(partial_credit)
        << "\n\n";
    out << "pass@1 " << fixed(pass_at_1) << "  pass@" << k << " " << fixed(pass_at_k) << "  hallucination "
        << fixed(hallucination.rate) << " (" << hallucination.hallucinated << "/" << hallucination.total << ")\n";
    for (const auto& [cat, n] : categories) out << "  " << cat << " " << n << "\n";
    for (const auto& wmsg : warnings) out << "warning: " << wmsg << "\n";
    return out.str();
}

}  // namespace qsynth::eval
