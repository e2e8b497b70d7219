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

#include "qsynth/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "qsynth/analyzer/features.hpp"
#include "qsynth/python/lexer.hpp"
#include "qsynth/python/parser.hpp"

namespace qsynth::eval {

using python::Node;
using python::NodeKind;

std::vector<std::string> metric_tokens(std::string_view code) {
    auto toks = python::lexical_tokens_or_words(code);
    if (toks.empty()) throw EmptyInput("no tokens in input");
    return toks;
}

double bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    if (hyp.empty() || ref.empty()) throw EmptyInput("BLEU needs non-empty token streams");
    double log_sum = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::map<std::vector<std::string>, std::size_t> ref_counts;
        for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[{ref.begin() + i, ref.begin() + i + n}];
        std::map<std::vector<std::string>, std::size_t> hyp_counts;
        std::size_t total = 0;
        for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
            ++hyp_counts[{hyp.begin() + i, hyp.begin() + i + n}];
            ++total;
        }
        std::size_t matched = 0;
        for (const auto& [gram, c] : hyp_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matched += std::min(c, it->second);
        }
        double p;
        if (matched == 0) {
            if (n == 1) return 0.0;
            p = 1.0 / static_cast<double>(total + 1);
        } else {
            p = static_cast<double>(matched) / static_cast<double>(total);
        }
        log_sum += std::log(p) / 4.0;
    }
    double c = static_cast<double>(hyp.size()), r = static_cast<double>(ref.size());
    double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return std::clamp(bp * std::exp(log_sum), 0.0, 1.0);
}

double token_bleu(std::string_view h, std::string_view r) { return bleu(metric_tokens(h), metric_tokens(r)); }

namespace {

bool is_identifier(const std::string& t) {
    return !t.empty() && (std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_') &&
           std::all_of(t.begin(), t.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

std::vector<std::string> upweight_qml(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i] == "qml" && i + 2 < tokens.size() && tokens[i + 1] == "." && is_identifier(tokens[i + 2])) {
            std::size_t j = i + 3;
            while (j + 1 < tokens.size() && tokens[j] == "." && is_identifier(tokens[j + 1])) j += 2;
            for (int rep = 0; rep < 3; ++rep) out.insert(out.end(), tokens.begin() + i, tokens.begin() + j);
            i = j;
            continue;
        }
        out.push_back(tokens[i++]);
    }
    return out;
}

double weighted_bleu(std::string_view h, std::string_view r) {
    return bleu(upweight_qml(metric_tokens(h)), upweight_qml(metric_tokens(r)));
}

namespace {

bool keeps_text(NodeKind k) {
    switch (k) {
        case NodeKind::BinOp:
        case NodeKind::UnaryOp:
        case NodeKind::BoolOp:
        case NodeKind::AugAssign:
        case NodeKind::Compare:
        case NodeKind::Pattern: return true;
        default: return false;
    }
}

bool keeps_aux(NodeKind k) { return k == NodeKind::Constant || k == NodeKind::Arg || k == NodeKind::ImportFrom; }

// returns height; appends signatures of qualifying subtrees
int collect(const Node& n, std::string& sig, std::multiset<std::string>& out) {
    sig = "(" + std::string(python::kind_name(n.kind));
    if (keeps_text(n.kind) && !n.text.empty()) sig += " " + n.text;
    if (keeps_aux(n.kind) && !n.aux.empty()) sig += " [" + n.aux + "]";
    int height = 1;
    for (const auto& c : n.children) {
        std::string child;
        height = std::max(height, 1 + collect(*c, child, out));
        sig += " " + child;
    }
    sig += ")";
    if (height >= 2) out.insert(sig);
    return height;
}

}  // namespace

std::multiset<std::string> syntax_subtrees(std::string_view code) {
    auto tree = python::parse_module(code);
    std::multiset<std::string> out;
    std::string sig;
    collect(*tree, sig, out);
    return out;
}

double ast_match(std::string_view h, std::string_view r) {
    auto ref = syntax_subtrees(r);
    std::multiset<std::string> hyp;
    try {
        hyp = syntax_subtrees(h);
    } catch (const SyntaxError&) {
        return 0.0;
    }
    if (ref.empty()) return 1.0;
    std::size_t matched = 0;
    for (auto it = ref.begin(); it != ref.end(); it = ref.upper_bound(*it))
        matched += std::min(ref.count(*it), hyp.count(*it));
    return static_cast<double>(matched) / static_cast<double>(ref.size());
}

std::set<std::string> dataflow_keys(std::string_view code) {
    auto f = analyzer::extract_features(code);
    std::set<std::string> k = f.gate_names;
    k.insert(f.device_types.begin(), f.device_types.end());
    k.insert(f.measurement_returns.begin(), f.measurement_returns.end());
    return k;
}

double dataflow_match(std::string_view h, std::string_view r) {
    auto kr = dataflow_keys(r);
    std::set<std::string> kh;
    try {
        kh = dataflow_keys(h);
    } catch (const SyntaxError&) {
        return 0.0;
    }
    if (kh.empty() && kr.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& k : kh) inter += kr.count(k);
    return static_cast<double>(inter) / static_cast<double>(kh.size() + kr.size() - inter);
}

double rouge_l(const std::vector<std::string>& h, const std::vector<std::string>& r) {
    if (h.empty() || r.empty()) throw EmptyInput("ROUGE-L needs non-empty token streams");
    std::vector<std::size_t> prev(r.size() + 1, 0), cur(r.size() + 1, 0);
    for (std::size_t i = 1; i <= h.size(); ++i) {
        for (std::size_t j = 1; j <= r.size(); ++j)
            cur[j] = h[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    double lcs = static_cast<double>(prev[r.size()]);
    if (lcs == 0) return 0.0;
    // F1 of LCS precision and recall, in the form that avoids compounding rounding
    return 2.0 * lcs / static_cast<double>(h.size() + r.size());
}

double rouge_l(std::string_view h, std::string_view r) { return rouge_l(metric_tokens(h), metric_tokens(r)); }

CodeMetrics compute_metrics(std::string_view h, std::string_view r) {
    CodeMetrics m;
    auto ht = metric_tokens(h);
    auto rt = metric_tokens(r);
    m.token_bleu = bleu(ht, rt);
    m.weighted_bleu = bleu(upweight_qml(ht), upweight_qml(rt));
    m.ast_match = ast_match(h, r);
    m.dataflow_match = dataflow_match(h, r);
    m.codebleu = 0.25 * (m.token_bleu + m.weighted_bleu + m.ast_match + m.dataflow_match);
    m.rouge_l = rouge_l(ht, rt);
    return m;
}

double pass_at_k(const std::vector<std::vector<bool>>& attempts, std::size_t k) {
    if (k == 0) throw ValidationError("k must be positive");
    if (attempts.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        if (attempts[i].size() < k)
            throw InsufficientAttempts("challenge " + std::to_string(i) + " has " + std::to_string(attempts[i].size()) +
                                       " attempts, need " + std::to_string(k));
        hits += std::any_of(attempts[i].begin(), attempts[i].begin() + static_cast<std::ptrdiff_t>(k), [](bool b) { return b; });
    }
    return static_cast<double>(hits) / static_cast<double>(attempts.size());
}

double partial_credit(const sandbox::ExecutionResult& result) {
    if (result.tests_total == 0) throw NoTests("execution has no test results");
    return static_cast<double>(result.tests_passed) / static_cast<double>(result.tests_total);
}

std::set<std::string> hallucinated_names(std::string_view code, const analyzer::Whitelist& wl) {
    try {
        return analyzer::whitelist_violations(analyzer::extract_features(code), wl);
    } catch (const SyntaxError&) {
        std::set<std::string> out;
        for (const auto& n : analyzer::lexical_qml_names(code))
            if (!wl.contains(n)) out.insert(n);
        return out;
    }
}

HallucinationStats hallucination_rate(const std::vector<std::string>& solutions, const analyzer::Whitelist& wl) {
    HallucinationStats s;
    s.total = solutions.size();
    if (solutions.empty()) {
        s.warning = "no solutions to check; hallucination rate defined as 0";
        return s;
    }
    for (const auto& code : solutions) s.hallucinated += !hallucinated_names(code, wl).empty();
    s.rate = static_cast<double>(s.hallucinated) / static_cast<double>(s.total);
    return s;
}

}  // namespace qsynth::eval
