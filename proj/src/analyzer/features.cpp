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

#include "qsynth/analyzer/features.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "qsynth/python/lexer.hpp"
#include "qsynth/python/parser.hpp"

namespace qsynth::analyzer {

using python::Node;
using python::NodeKind;

namespace {

constexpr std::string_view kFramework = "pennylane";

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

// Maps a locally bound name to the framework path it stands for. An empty
// path means the name is the framework namespace itself.
using Bindings = std::map<std::string, std::string>;

std::optional<std::string> framework_subpath(const std::string& module) {
    if (module == kFramework) return std::string();
    if (starts_with(module, std::string(kFramework) + ".")) return module.substr(kFramework.size() + 1);
    return std::nullopt;
}

bool excluded_path(const std::string& path) { return path == "numpy" || starts_with(path, "numpy."); }

Bindings collect_bindings(const Node& module) {
    Bindings b;
    b["qml"] = "";
    python::walk(module, [&](const Node& n) {
        if (n.is(NodeKind::Import)) {
            for (const auto& alias : n.children) {
                auto sub = framework_subpath(alias->text);
                std::string bound = alias->aux.empty() ? alias->text.substr(0, alias->text.find('.')) : alias->aux;
                if (!sub) {
                    b.erase(bound);
                    continue;
                }
                if (alias->aux.empty()) {
                    b[std::string(kFramework)] = "";
                } else if (!excluded_path(*sub)) {
                    b[bound] = *sub;
                } else {
                    b.erase(bound);
                }
            }
        } else if (n.is(NodeKind::ImportFrom) && n.aux.empty()) {
            auto sub = framework_subpath(n.text);
            for (const auto& alias : n.children) {
                if (alias->text == "*") continue;
                std::string bound = alias->aux.empty() ? alias->text : alias->aux;
                if (!sub) {
                    b.erase(bound);
                    continue;
                }
                std::string path = sub->empty() ? alias->text : *sub + "." + alias->text;
                if (excluded_path(path)) {
                    b.erase(bound);
                } else {
                    b[bound] = path;
                }
            }
        }
        return true;
    });
    return b;
}

void collect_calls(const Node& n, const Bindings& bindings, bool in_return, std::vector<QmlCall>& out) {
    bool ret = in_return || n.is(NodeKind::Return);
    if (n.is(NodeKind::Call)) {
        std::string callee = python::dotted_name(*n.children.front());
        if (!callee.empty()) {
            auto dot = callee.find('.');
            std::string root = callee.substr(0, dot);
            auto it = bindings.find(root);
            if (it != bindings.end()) {
                std::string rest = dot == std::string::npos ? std::string() : callee.substr(dot + 1);
                std::string path = it->second;
                if (!rest.empty()) path = path.empty() ? rest : path + "." + rest;
                if (!path.empty()) out.push_back(QmlCall{path, &n, ret});
            }
        }
    }
    for (const auto& child : n.children) collect_calls(*child, bindings, ret, out);
}

}  // namespace

bool is_measurement_name(std::string_view name) {
    return std::find(kMeasurementNames.begin(), kMeasurementNames.end(), name) != kMeasurementNames.end();
}

std::set<std::string> QuantumFeatureSet::key_set() const {
    std::set<std::string> k = gate_names;
    k.insert(device_types.begin(), device_types.end());
    k.insert(measurement_returns.begin(), measurement_returns.end());
    return k;
}

void to_json(nlohmann::json& j, const QuantumFeatureSet& f) {
    j = nlohmann::json{
        {"gate_names", f.gate_names},
        {"device_types", f.device_types},
        {"measurement_returns", f.measurement_returns},
        {"imports", f.imports},
        {"qml_call_count", f.qml_call_count},
        {"gate_count", f.gate_count},
        {"measurement_count", f.measurement_count},
        {"deprecated_count", f.deprecated_count},
    };
}

void from_json(const nlohmann::json& j, QuantumFeatureSet& f) {
    f.gate_names = j.value("gate_names", std::set<std::string>{});
    f.device_types = j.value("device_types", std::set<std::string>{});
    f.measurement_returns = j.value("measurement_returns", std::set<std::string>{});
    f.imports = j.value("imports", std::set<std::string>{});
    f.qml_call_count = j.value("qml_call_count", std::size_t{0});
    f.gate_count = j.value("gate_count", std::size_t{0});
    f.measurement_count = j.value("measurement_count", std::size_t{0});
    f.deprecated_count = j.value("deprecated_count", std::size_t{0});
}

std::vector<QmlCall> find_qml_calls(const Node& module) {
    std::vector<QmlCall> calls;
    collect_calls(module, collect_bindings(module), false, calls);
    return calls;
}

std::set<std::string> imported_modules(const Node& module) {
    std::set<std::string> out;
    python::walk(module, [&](const Node& n) {
        if (n.is(NodeKind::Import)) {
            for (const auto& alias : n.children) out.insert(alias->text.substr(0, alias->text.find('.')));
        } else if (n.is(NodeKind::ImportFrom) && n.aux.empty() && !n.text.empty()) {
            out.insert(n.text.substr(0, n.text.find('.')));
        }
        return true;
    });
    return out;
}

QuantumFeatureSet extract_features(const Node& module) {
    QuantumFeatureSet f;
    f.imports = imported_modules(module);
    for (const auto& call : find_qml_calls(module)) {
        ++f.qml_call_count;
        if (starts_with(call.path, "templates.")) ++f.deprecated_count;
        if (call.path == "device") {
            const Node& c = *call.call;
            if (c.children.size() > 1) {
                const Node& first = *c.children[1];
                if (first.is(NodeKind::Constant) && first.aux == "str")
                    f.device_types.insert(python::string_literal_value(first.text));
            }
            continue;
        }
        if (is_measurement_name(call.path)) {
            ++f.measurement_count;
            if (call.in_return) f.measurement_returns.insert(call.path);
            continue;
        }
        ++f.gate_count;
        f.gate_names.insert(call.path);
    }
    return f;
}

QuantumFeatureSet extract_features(std::string_view code) {
    auto module = python::parse_module(code);
    return extract_features(*module);
}

std::set<std::string> lexical_qml_names(std::string_view code) {
    std::set<std::string> out;
    auto toks = python::lexical_tokens_or_words(code);
    for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
        if (toks[i] != "qml" || toks[i + 1] != ".") continue;
        if (i > 0 && toks[i - 1] == ".") continue;
        std::string name = toks[i + 2];
        std::size_t j = i + 3;
        while (j + 1 < toks.size() && toks[j] == "." && !toks[j + 1].empty() &&
               (std::isalpha(static_cast<unsigned char>(toks[j + 1][0])) || toks[j + 1][0] == '_')) {
            name += "." + toks[j + 1];
            j += 2;
        }
        out.insert(name);
    }
    // Whitespace-split fallback: "qml.RX(0.1," style words.
    if (out.empty()) {
        for (const auto& word : toks) {
            auto pos = word.find("qml.");
            if (pos == std::string::npos) continue;
            std::string name;
            for (std::size_t k = pos + 4; k < word.size(); ++k) {
                char c = word[k];
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') name.push_back(c);
                else break;
            }
            while (!name.empty() && name.back() == '.') name.pop_back();
            if (!name.empty()) out.insert(name);
        }
    }
    return out;
}

}  // namespace qsynth::analyzer
