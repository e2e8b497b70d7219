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

#include "qsynth/corpus/stage2.hpp"

#include <cmath>
#include <sstream>

#include "qsynth/python/parser.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::corpus {

using python::Node;
using python::NodeKind;

ModernizePrompts ModernizePrompts::builtin() { return load({}); }

ModernizePrompts ModernizePrompts::load(const std::filesystem::path& dir) {
    return {text::trim(io::load_resource("prompts/modernize_system.txt", dir)),
            text::trim(io::load_resource("prompts/modernize_user.txt", dir))};
}

std::string modernize(std::string_view code, llm::Gateway& gateway, const ModernizePrompts& prompts,
                      const llm::ChatRequest& defaults) {
    if (auto err = python::compile_error(code)) throw ValidationError("cannot modernize unparseable code: " + *err);
    llm::ChatRequest req = defaults;
    req.messages = {{"system", prompts.system}, {"user", text::render(prompts.user, {{"code", std::string(code)}})}};
    return text::strip_code_fences(gateway.chat(req));
}

bool VerificationReport::all_passed() const {
    for (const auto& l : layers)
        if (!l.passed) return false;
    return true;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& l : layers) ls.push_back({{"layer", l.name}, {"pass", l.passed}, {"detail", l.detail}});
    nlohmann::json j = {
        {"layers", ls},
        {"verdict", to_string(verdict)},
        {"fallback_applied", fallback_applied},
        {"original_features", original_features},
    };
    if (transformed_features) j["transformed_features"] = *transformed_features;
    return j;
}

std::string return_shape(const Node& ret) {
    if (ret.children.empty()) return "none";
    const Node& v = *ret.children.front();
    switch (v.kind) {
        case NodeKind::List:
        case NodeKind::ListComp: return "list";
        case NodeKind::Tuple: return "tuple";
        case NodeKind::Dict:
        case NodeKind::DictComp: return "dict";
        case NodeKind::Constant: return v.text == "None" ? "none" : "single";
        default: return "single";
    }
}

std::vector<std::string> return_shapes(const Node& module) {
    std::vector<std::string> out;
    python::walk(module, [&](const Node& n) {
        if (n.is(NodeKind::Return)) out.push_back(return_shape(n));
        return true;
    });
    return out;
}

namespace {

const char* kLayerNames[4] = {"syntax", "imports", "quantum_preservation", "semantic_structure"};

bool isolated_imports_ok(const analyzer::QuantumFeatureSet& f) {
    return f.qml_call_count == 0 || f.imports.count("pennylane") > 0;
}

double relative_change(std::size_t before, std::size_t after) {
    double diff = std::fabs(static_cast<double>(after) - static_cast<double>(before));
    return diff / static_cast<double>(std::max<std::size_t>(before, 1));
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << v;
    return ss.str();
}

std::string join_set(const std::set<std::string>& s) {
    return text::join(std::vector<std::string>(s.begin(), s.end()), ", ");
}

}  // namespace

VerificationReport verify(std::string_view original, std::optional<std::string_view> transformed,
                          const VerifyThresholds& thresholds) {
    VerificationReport r;
    for (int i = 0; i < 4; ++i) r.layers[i].name = kLayerNames[i];

    python::NodePtr orig_tree;
    try {
        orig_tree = python::parse_module(original);
    } catch (const SyntaxError& e) {
        r.layers[0].detail = std::string("original does not parse: ") + e.what();
        for (int i = 1; i < 4; ++i) r.layers[i].detail = "skipped";
        r.verdict = Verdict::Rejected;
        r.fallback_applied = transformed.has_value();
        return r;
    }
    r.original_features = analyzer::extract_features(*orig_tree);

    if (!transformed) {
        r.layers[0] = {kLayerNames[0], true, "original parses"};
        bool ok = isolated_imports_ok(r.original_features);
        r.layers[1] = {kLayerNames[1], ok, ok ? "framework import present" : "qml calls without a pennylane import"};
        r.layers[2] = {kLayerNames[2], true, "no transformation"};
        r.layers[3] = {kLayerNames[3], true, "no transformation"};
        r.verdict = ok ? Verdict::OriginalValid : Verdict::Rejected;
        return r;
    }

    python::NodePtr trans_tree;
    try {
        trans_tree = python::parse_module(*transformed);
        r.layers[0] = {kLayerNames[0], true, "transformed code parses"};
    } catch (const SyntaxError& e) {
        r.layers[0].detail = std::string("transformed code does not parse: ") + e.what();
        for (int i = 1; i < 4; ++i) r.layers[i].detail = "skipped";
    }

    if (trans_tree) {
        const auto& o = r.original_features;
        auto t = analyzer::extract_features(*trans_tree);
        r.transformed_features = t;

        std::set<std::string> missing;
        for (const auto& m : o.imports)
            if (kQuantumRelevantModules.count(m) && !t.imports.count(m)) missing.insert(m);
        r.layers[1].passed = missing.empty();
        r.layers[1].detail = missing.empty() ? "quantum-relevant imports kept" : "missing imports: " + join_set(missing);

        double gate_delta = relative_change(o.gate_count, t.gate_count);
        double call_delta = relative_change(o.qml_call_count, t.qml_call_count);
        std::vector<std::string> problems;
        if (gate_delta > thresholds.max_gate_change)
            problems.push_back("gate count " + std::to_string(o.gate_count) + "->" + std::to_string(t.gate_count) +
                               " changes by " + fmt(gate_delta));
        if (call_delta > thresholds.max_qml_call_change)
            problems.push_back("qml call count " + std::to_string(o.qml_call_count) + "->" +
                               std::to_string(t.qml_call_count) + " changes by " + fmt(call_delta));
        if (o.measurement_count != t.measurement_count)
            problems.push_back("measurement count " + std::to_string(o.measurement_count) + "->" +
                               std::to_string(t.measurement_count));
        if (o.measurement_returns != t.measurement_returns)
            problems.push_back("measurement returns {" + join_set(o.measurement_returns) + "} -> {" +
                               join_set(t.measurement_returns) + "}");
        r.layers[2].passed = problems.empty();
        r.layers[2].detail = problems.empty()
                                 ? "deprecated " + std::to_string(o.deprecated_count) + "->" + std::to_string(t.deprecated_count) +
                                       ", qml total " + std::to_string(o.qml_call_count) + "->" +
                                       std::to_string(t.qml_call_count) + ", measurements " +
                                       std::to_string(o.measurement_count) + "->" + std::to_string(t.measurement_count)
                                 : text::join(problems, "; ");

        auto os = return_shapes(*orig_tree);
        auto ts = return_shapes(*trans_tree);
        r.layers[3].passed = os == ts;
        r.layers[3].detail = r.layers[3].passed ? std::to_string(os.size()) + " return statement(s) unchanged"
                                                : "returns [" + text::join(os, ", ") + "] -> [" + text::join(ts, ", ") + "]";
    }

    if (r.all_passed()) {
        r.verdict = Verdict::TransformedValid;
        return r;
    }
    r.fallback_applied = true;
    r.verdict = isolated_imports_ok(r.original_features) ? Verdict::OriginalValid : Verdict::Rejected;
    return r;
}

Stage2Outcome process(const ExtractedFunction& fn, llm::Gateway* gateway, const Stage2Options& options) {
    Stage2Outcome out;
    out.entry.id = fn.id;
    out.entry.category = fn.category;
    out.entry.origin_url = fn.origin_url;
    out.entry.parent_ids = {fn.parent_id};

    std::optional<std::string> transformed;
    bool parses = python::compiles(fn.code);
    if (options.modernize && gateway && parses) {
        auto features = analyzer::extract_features(fn.code);
        if (!options.only_deprecated || features.deprecated_count > 0) {
            out.modernization_attempted = true;
            try {
                transformed = modernize(fn.code, *gateway, options.prompts, options.request_defaults);
            } catch (const llm::GatewayError& e) {
                out.gateway_error = e.what();
            }
        }
    }

    if (transformed) {
        out.report = verify(fn.code, std::string_view(*transformed), options.thresholds);
    } else {
        out.report = verify(fn.code, std::nullopt, options.thresholds);
        if (out.modernization_attempted) out.report.fallback_applied = true;
    }
    out.entry.verdict = out.report.verdict;
    if (out.report.verdict == Verdict::TransformedValid) {
        out.entry.code = *transformed;
        out.entry.features = *out.report.transformed_features;
    } else {
        out.entry.code = fn.code;
        out.entry.features = out.report.original_features;
    }
    return out;
}

}  // namespace qsynth::corpus
