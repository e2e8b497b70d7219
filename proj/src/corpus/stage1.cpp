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

#include "qsynth/corpus/stage1.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <unordered_set>

#include "qsynth/python/parser.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/parallel.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::corpus {

using python::Node;
using python::NodeKind;

namespace {

struct ImportBinding {
    const Node* stmt;
    const Node* alias;
    std::string bound;
};

std::vector<ImportBinding> module_imports(const Node& module) {
    std::vector<ImportBinding> out;
    for (const auto& stmt : module.children) {
        if (stmt->is(NodeKind::Import)) {
            for (const auto& a : stmt->children) {
                std::string bound = a->aux.empty() ? a->text.substr(0, a->text.find('.')) : a->aux;
                out.push_back({stmt.get(), a.get(), bound});
            }
        } else if (stmt->is(NodeKind::ImportFrom)) {
            for (const auto& a : stmt->children) {
                if (a->text == "*") continue;
                out.push_back({stmt.get(), a.get(), a->aux.empty() ? a->text : a->aux});
            }
        }
    }
    return out;
}

std::string alias_text(const Node& a) { return a.aux.empty() ? a.text : a.text + " as " + a.aux; }

// Canonical import lines for the bindings whose names appear in `used`,
// grouped by original statement and kept in source order.
std::string hoisted_imports(const std::vector<ImportBinding>& imports, const std::set<std::string>& used) {
    std::vector<std::string> lines;
    const Node* current = nullptr;
    std::vector<std::string> names;
    auto flush = [&] {
        if (!current || names.empty()) return;
        if (current->is(NodeKind::Import)) {
            lines.push_back("import " + text::join(names, ", "));
        } else {
            lines.push_back("from " + current->aux + current->text + " import " + text::join(names, ", "));
        }
        names.clear();
    };
    std::set<std::string> seen;
    for (const auto& b : imports) {
        if (!used.count(b.bound)) continue;
        if (b.stmt != current) {
            flush();
            current = b.stmt;
        }
        std::string t = alias_text(*b.alias);
        if (seen.insert(current->kind == NodeKind::Import ? t : current->text + ":" + t).second) names.push_back(t);
    }
    flush();
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::set<std::string> parameter_names(const Node& fn) {
    std::set<std::string> out;
    for (const auto& child : fn.children) {
        if (!child->is(NodeKind::Arguments)) continue;
        for (const auto& arg : child->children)
            if (arg->is(NodeKind::Arg)) out.insert(arg->text);
    }
    return out;
}

std::set<std::string> referenced_names(const Node& root) {
    std::set<std::string> out;
    python::walk(root, [&](const Node& n) {
        if (n.is(NodeKind::Name)) out.insert(n.text);
        return true;
    });
    return out;
}

std::string slice_lines(const std::vector<std::string>& lines, int first, int last) {
    std::string out;
    for (int l = first; l <= last && l <= static_cast<int>(lines.size()); ++l) {
        out += lines[static_cast<std::size_t>(l - 1)];
        out.push_back('\n');
    }
    return out;
}

std::string assemble(const std::string& imports, const std::string& body) {
    return imports.empty() ? body : imports + "\n" + body;
}

void collect_functions(const Node& n, std::vector<const Node*>& out) {
    if (python::is_function(n.kind)) out.push_back(&n);
    for (const auto& c : n.children) collect_functions(*c, out);
}

bool has_qnode_decorator(const Node& fn) {
    const Node& decos = *fn.children.front();
    for (const auto& d : decos.children) {
        const Node* e = d.get();
        if (e->is(NodeKind::Call)) e = e->children.front().get();
        std::string path = text::to_lower(python::dotted_name(*e));
        if (path.size() >= 5 && path.compare(path.size() - 5, 5, "qnode") == 0) return true;
    }
    return false;
}

struct DeviceVar {
    std::string name;
    int line;
};

std::vector<DeviceVar> device_variables(const Node& module, const std::vector<analyzer::QmlCall>& calls) {
    std::unordered_set<const Node*> device_calls;
    for (const auto& c : calls)
        if (c.path == "device") device_calls.insert(c.call);
    std::vector<DeviceVar> out;
    for (const auto& stmt : module.children) {
        if (!stmt->is(NodeKind::Assign) && !stmt->is(NodeKind::AnnAssign)) continue;
        const Node* value = stmt->children.back().get();
        if (!device_calls.count(value)) continue;
        for (std::size_t i = 0; i + 1 < stmt->children.size(); ++i) {
            const Node& target = *stmt->children[i];
            if (target.is(NodeKind::Name)) out.push_back({target.text, stmt->line});
        }
    }
    return out;
}

bool contains_call(const Node& root, const std::unordered_set<const Node*>& calls) {
    bool found = false;
    python::walk(root, [&](const Node& n) {
        if (found) return false;
        if (calls.count(&n)) found = true;
        return !found;
    });
    return found;
}

bool is_docstring(const Node& stmt) {
    return stmt.is(NodeKind::Expr) && !stmt.children.empty() && stmt.children.front()->is(NodeKind::Constant) &&
           stmt.children.front()->aux == "str";
}

}  // namespace

ExtractionStats& ExtractionStats::operator+=(const ExtractionStats& o) {
    files += o.files;
    parse_failures += o.parse_failures;
    enumerated += o.enumerated;
    retained += o.retained;
    direct += o.direct;
    contextual += o.contextual;
    return *this;
}

nlohmann::json ExtractionStats::to_json() const {
    return {{"files", files},           {"parse_failures", parse_failures}, {"enumerated", enumerated},
            {"retained", retained},     {"direct", direct},                 {"contextual", contextual}};
}

std::vector<ExtractedFunction> ExtractionResult::retained() const {
    std::vector<ExtractedFunction> out;
    for (const auto& f : functions)
        if (f.classification != Classification::Rejected) out.push_back(f);
    return out;
}

ExtractionResult extract(const SourceRecord& record) {
    if (text::trim(record.raw_text).empty()) throw ValidationError(record.id + ": empty source");
    python::NodePtr module;
    try {
        module = python::parse_module(record.raw_text);
    } catch (const SyntaxError& e) {
        throw ParseFailure(record.id, e);
    }
    const auto lines = text::split_lines(record.raw_text);
    const auto imports = module_imports(*module);
    const auto calls = analyzer::find_qml_calls(*module);
    const auto devices = device_variables(*module, calls);

    ExtractionResult result;
    result.stats.files = 1;

    auto finish = [&](ExtractedFunction f, bool contextual_hint) {
        f.parent_id = record.id;
        f.id = record.id + ":" + f.name + ":" + std::to_string(f.start_line);
        f.category = record.category;
        f.origin_url = record.origin_url;
        auto parsed = python::compile_error(f.code);
        if (!parsed) {
            f.features = analyzer::extract_features(f.code);
            if (f.features.qml_call_count > 0) {
                f.classification = Classification::Direct;
            } else if (contextual_hint) {
                f.classification = Classification::Contextual;
            }
        }
        ++result.stats.enumerated;
        if (f.classification == Classification::Direct) ++result.stats.direct;
        if (f.classification == Classification::Contextual) ++result.stats.contextual;
        if (f.classification != Classification::Rejected) ++result.stats.retained;
        result.functions.push_back(std::move(f));
    };

    std::vector<const Node*> functions;
    collect_functions(*module, functions);
    for (const Node* fn : functions) {
        auto params = parameter_names(*fn);
        auto used = referenced_names(*fn);
        for (const auto& p : params) used.erase(p);
        bool uses_device = std::any_of(devices.begin(), devices.end(), [&](const DeviceVar& d) {
            return d.line < fn->line && used.count(d.name);
        });
        ExtractedFunction f;
        f.name = fn->text;
        f.start_line = fn->line;
        f.end_line = fn->end_line;
        std::string body = text::dedent(slice_lines(lines, fn->line, fn->end_line), static_cast<std::size_t>(fn->column));
        f.code = assemble(hoisted_imports(imports, used), body);
        finish(std::move(f), uses_device || has_qnode_decorator(*fn));
    }

    std::unordered_set<const Node*> call_nodes;
    for (const auto& c : calls) call_nodes.insert(c.call);
    std::vector<const Node*> loose;
    for (std::size_t i = 0; i < module->children.size(); ++i) {
        const Node& stmt = *module->children[i];
        if (python::is_function(stmt.kind) || stmt.is(NodeKind::ClassDef) || stmt.is(NodeKind::Import) ||
            stmt.is(NodeKind::ImportFrom) || (i == 0 && is_docstring(stmt)))
            continue;
        loose.push_back(&stmt);
    }
    bool quantum_loose = std::any_of(loose.begin(), loose.end(), [&](const Node* s) { return contains_call(*s, call_nodes); });
    if (quantum_loose) {
        std::string body = std::string("def ") + kModuleBodyName + "():\n";
        std::set<std::string> used;
        int last_line = 0;
        for (const Node* s : loose) {
            auto names = referenced_names(*s);
            used.insert(names.begin(), names.end());
            for (int l = std::max(s->line, last_line + 1); l <= s->end_line; ++l) {
                const std::string& src = lines[static_cast<std::size_t>(l - 1)];
                body += src.empty() ? "\n" : "    " + src + "\n";
            }
            last_line = std::max(last_line, s->end_line);
        }
        ExtractedFunction f;
        f.name = kModuleBodyName;
        f.start_line = loose.front()->line;
        f.end_line = last_line;
        f.code = assemble(hoisted_imports(imports, used), body);
        finish(std::move(f), false);
    }
    return result;
}

ExtractionResult extract_all(const std::vector<SourceRecord>& records, unsigned workers,
                             const std::function<void(const ParseFailure&)>& on_failure) {
    std::vector<ExtractionResult> partial(records.size());
    std::vector<bool> failed(records.size(), false);
    std::mutex mu;
    parallel_for(records.size(), workers, [&](std::size_t i) {
        try {
            partial[i] = extract(records[i]);
        } catch (const ParseFailure& e) {
            failed[i] = true;
            if (on_failure) {
                std::lock_guard<std::mutex> lock(mu);
                on_failure(e);
            }
        }
    });
    ExtractionResult all;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (failed[i]) {
            ++all.stats.files;
            ++all.stats.parse_failures;
            continue;
        }
        all.stats += partial[i].stats;
        for (auto& f : partial[i].functions) all.functions.push_back(std::move(f));
    }
    return all;
}

std::vector<SourceRecord> load_manifest(const std::filesystem::path& manifest) {
    std::vector<SourceRecord> out;
    auto base = manifest.parent_path();
    std::set<std::string> ids;
    int line_no = 0;
    for (const auto& raw : text::split_lines(io::read_file(manifest))) {
        ++line_no;
        std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        std::string id, category, url, path;
        if (line[0] == '{') {
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object())
                throw ValidationError(manifest.string() + ":" + std::to_string(line_no) + ": invalid JSON");
            id = j.value("id", "");
            category = j.value("category", "");
            url = j.value("url", "");
            path = j.value("path", "");
        } else {
            std::vector<std::string> fields;
            std::size_t start = 0;
            for (;;) {
                auto tab = raw.find('\t', start);
                fields.push_back(raw.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
                if (tab == std::string::npos) break;
                start = tab + 1;
            }
            if (fields.size() != 4)
                throw ValidationError(manifest.string() + ":" + std::to_string(line_no) + ": expected 4 tab-separated fields");
            id = fields[0];
            category = fields[1];
            url = fields[2];
            path = fields[3];
        }
        if (id.empty() || path.empty())
            throw ValidationError(manifest.string() + ":" + std::to_string(line_no) + ": id and path are required");
        if (!ids.insert(id).second) throw ValidationError(manifest.string() + ": duplicate id " + id);
        std::filesystem::path p(path);
        if (p.is_relative()) p = base / p;
        SourceRecord r;
        r.id = id;
        r.category = parse_category(category);
        r.origin_url = url;
        r.raw_text = io::read_file(p);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SourceRecord> scan_directory(const std::filesystem::path& dir, SourceCategory category) {
    if (!std::filesystem::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".py") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<SourceRecord> out;
    for (const auto& p : files) {
        SourceRecord r;
        r.id = std::filesystem::relative(p, dir).generic_string();
        r.category = category;
        r.origin_url = "file://" + std::filesystem::absolute(p).string();
        r.raw_text = io::read_file(p);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace qsynth::corpus
