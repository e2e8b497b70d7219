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

#include "qsynth/app/config.hpp"

#include <set>

#include "qsynth/llm/providers.hpp"
#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/parallel.hpp"

namespace qsynth::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Typed reads from one JSON object; leftover keys are an error.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ValidationError("config: " + name_ + " must be an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config: " + name_ + "." + key + " has the wrong type");
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ValidationError("config: unknown key " + name_ + "." + k);
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

Config Config::load(const fs::path& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

Config Config::from_json(const json& j, const fs::path& base) {
    Config c;
    Section root(j, "config");
    root.read("seed", c.seed);
    root.read("workers", c.workers);
    std::string res;
    root.read("resources_dir", res);
    c.resources_dir = resolve(base, res);

    if (const json* l = root.child("llm")) {
        Section s(*l, "llm");
        s.read("provider", c.provider);
        int backoff_ms = static_cast<int>(c.gateway.initial_backoff.count());
        s.read("max_retries", c.gateway.max_retries);
        s.read("initial_backoff_ms", backoff_ms);
        c.gateway.initial_backoff = std::chrono::milliseconds(backoff_ms);
        s.read("backoff_factor", c.gateway.backoff_factor);
        s.read("max_in_flight", c.gateway.max_in_flight);
        std::string log;
        s.read("log_path", log);
        c.gateway.log_path = resolve(base, log);
        s.read("redact_contents", c.gateway.redact_contents);
        if (const json* ps = s.child("providers")) {
            if (!ps->is_object()) throw ValidationError("config: llm.providers must be an object");
            for (const auto& [name, spec] : ps->items()) {
                if (!spec.is_object()) throw ValidationError("config: provider " + name + " must be an object");
                ProviderSpec p{name, spec.value("type", "mock"), spec};
                if (p.type != "mock" && p.type != "http")
                    throw ValidationError("config: provider " + name + " has unknown type " + p.type);
                if (p.settings.contains("script") && p.settings["script"].is_string())
                    p.settings["script"] = resolve(base, p.settings["script"].get<std::string>()).string();
                c.providers[name] = std::move(p);
            }
        }
        s.finish();
    }

    if (const json* e = root.child("embedding")) {
        if (!e->is_object()) throw ValidationError("config: embedding must be an object");
        c.embedding.settings = *e;
        c.embedding.type = e->value("type", "hashing");
        try {
            c.embedding.dim = e->value("dim", std::size_t{768});
        } catch (const json::exception&) {
            throw ValidationError("config: embedding.dim must be a positive integer");
        }
        if (c.embedding.type != "hashing" && c.embedding.type != "http")
            throw ValidationError("config: unknown embedding type " + c.embedding.type);
    }

    if (const json* v = root.child("verify")) {
        Section s(*v, "verify");
        s.read("modernize", c.modernize);
        s.read("only_deprecated", c.only_deprecated);
        s.read("max_gate_change", c.thresholds.max_gate_change);
        s.read("max_qml_call_change", c.thresholds.max_qml_call_change);
        s.finish();
    }
    if (const json* d = root.child("dedup")) {
        Section s(*d, "dedup");
        s.read("threshold", c.dedup_threshold);
        s.read("bands", c.dedup_bands);
        s.read("rows", c.dedup_rows);
        s.finish();
    }
    if (const json* i = root.child("instruct")) {
        Section s(*i, "instruct");
        s.read("min_words", c.instruction_limits.min_words);
        s.read("max_words", c.instruction_limits.max_words);
        s.read("regenerations", c.regenerations);
        s.finish();
    }
    if (const json* r = root.child("rag")) {
        Section s(*r, "rag");
        s.read("tau", c.rag.tau);
        s.read("k", c.rag.k);
        s.read("max_fixes", c.rag.max_fixes);
        s.read("temperature", c.rag.temperature);
        s.read("max_tokens", c.rag.max_tokens);
        s.read("model_id", c.rag.model_id);
        s.read("retrieval", c.rag.retrieval);
        s.read("expand", c.rag.expand);
        double limit = c.rag.execution_limit.count();
        s.read("execution_limit_seconds", limit);
        c.rag.execution_limit = std::chrono::duration<double>(limit);
        s.read("runs", c.runs);
        s.finish();
    }
    if (const json* x = root.child("executor")) {
        Section s(*x, "executor");
        s.read("python", c.python);
        std::string shim;
        s.read("shim", shim);
        c.shim = resolve(base, shim);
        s.read("max_concurrent", c.max_concurrent);
        s.read("output_cap", c.output_cap);
        s.finish();
    }
    if (const json* ev = root.child("eval")) {
        Section s(*ev, "eval");
        s.read("k", c.eval_k);
        s.finish();
    }
    root.finish();
    c.validate();
    return c;
}

json Config::to_json() const {
    json providers_json = json::object();
    for (const auto& [name, p] : providers) providers_json[name] = p.settings;
    return {
        {"seed", seed},
        {"workers", workers},
        {"resources_dir", resources_dir.string()},
        {"llm",
         {{"provider", provider},
          {"providers", providers_json},
          {"max_retries", gateway.max_retries},
          {"initial_backoff_ms", gateway.initial_backoff.count()},
          {"backoff_factor", gateway.backoff_factor},
          {"max_in_flight", gateway.max_in_flight},
          {"log_path", gateway.log_path.string()},
          {"redact_contents", gateway.redact_contents}}},
        {"embedding", [&] {
             json e = embedding.settings;
             e["type"] = embedding.type;
             e["dim"] = embedding.dim;
             return e;
         }()},
        {"verify",
         {{"modernize", modernize},
          {"only_deprecated", only_deprecated},
          {"max_gate_change", thresholds.max_gate_change},
          {"max_qml_call_change", thresholds.max_qml_call_change}}},
        {"dedup", {{"threshold", dedup_threshold}, {"bands", dedup_bands}, {"rows", dedup_rows}}},
        {"instruct",
         {{"min_words", instruction_limits.min_words},
          {"max_words", instruction_limits.max_words},
          {"regenerations", regenerations}}},
        {"rag",
         {{"tau", rag.tau},
          {"k", rag.k},
          {"max_fixes", rag.max_fixes},
          {"temperature", rag.temperature},
          {"max_tokens", rag.max_tokens},
          {"model_id", rag.model_id},
          {"retrieval", rag.retrieval},
          {"expand", rag.expand},
          {"execution_limit_seconds", rag.execution_limit.count()},
          {"runs", runs}}},
        {"executor",
         {{"python", python}, {"shim", shim.string()}, {"max_concurrent", max_concurrent}, {"output_cap", output_cap}}},
        {"eval", {{"k", eval_k}}},
    };
}

unsigned Config::effective_workers() const { return workers ? workers : default_workers(); }

void Config::validate() const {
    if (!(dedup_threshold >= 0 && dedup_threshold <= 1)) throw ValidationError("config: dedup.threshold must be in [0, 1]");
    if (dedup_bands * dedup_rows != corpus::kNumPermutations)
        throw ValidationError("config: dedup.bands * dedup.rows must be " + std::to_string(corpus::kNumPermutations));
    if (instruction_limits.min_words > instruction_limits.max_words)
        throw ValidationError("config: instruct.min_words exceeds max_words");
    if (regenerations < 0) throw ValidationError("config: instruct.regenerations must be >= 0");
    if (runs == 0) throw ValidationError("config: rag.runs must be >= 1");
    if (eval_k == 0) throw ValidationError("config: eval.k must be >= 1");
    if (embedding.dim == 0) throw ValidationError("config: embedding.dim must be positive");
    if (max_concurrent == 0) throw ValidationError("config: executor.max_concurrent must be >= 1");
    if (!(rag.execution_limit.count() > 0)) throw ValidationError("config: rag.execution_limit_seconds must be positive");
    if (gateway.max_retries < 0 || gateway.max_in_flight < 1) throw ValidationError("config: bad llm retry settings");
    rag.validate();
}

std::shared_ptr<llm::ChatProvider> make_chat_provider(const Config& cfg) {
    auto it = cfg.providers.find(cfg.provider);
    if (it == cfg.providers.end()) {
        if (cfg.provider == "mock") return std::make_shared<llm::ScriptedProvider>("mock");
        throw ValidationError("unknown provider " + cfg.provider);
    }
    const ProviderSpec& p = it->second;
    const json& s = p.settings;
    try {
        if (p.type == "mock") {
            if (s.contains("script")) return llm::ScriptedProvider::load(s["script"].get<std::string>());
            return llm::ScriptedProvider::from_json(s, p.name);
        }
        llm::HttpProviderConfig h;
        h.id = p.name;
        h.base_url = s.at("base_url").get<std::string>();
        h.model = s.value("model", "");
        h.api_key_env = s.value("api_key_env", "");
        h.headers = s.value("headers", std::map<std::string, std::string>{});
        h.timeout_seconds = s.value("timeout_seconds", 120);
        return std::make_shared<llm::HttpChatProvider>(h);
    } catch (const json::exception& e) {
        throw ValidationError("config: provider " + p.name + ": " + e.what());
    }
}

std::unique_ptr<retrieval::EmbeddingProvider> make_embedding_provider(const Config& cfg) {
    if (cfg.embedding.type == "hashing")
        return std::make_unique<retrieval::HashingEmbeddingProvider>(cfg.embedding.dim, cfg.seed);
    const json& s = cfg.embedding.settings;
    try {
        retrieval::HttpEmbeddingConfig h;
        h.id = s.value("id", h.id);
        h.base_url = s.at("base_url").get<std::string>();
        h.model = s.value("model", "");
        h.api_key_env = s.value("api_key_env", "");
        h.dim = cfg.embedding.dim;
        h.headers = s.value("headers", std::map<std::string, std::string>{});
        h.timeout_seconds = s.value("timeout_seconds", 60);
        h.batch_size = s.value("batch_size", std::size_t{32});
        return std::make_unique<retrieval::HttpEmbeddingProvider>(h);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: embedding: ") + e.what());
    }
}

sandbox::SubprocessOptions executor_options(const Config& cfg) {
    sandbox::SubprocessOptions o;
    o.python = cfg.python;
    o.shim_path = cfg.shim;
    o.default_limit = cfg.rag.execution_limit;
    o.max_concurrent = cfg.max_concurrent;
    o.output_cap = cfg.output_cap;
    return o;
}

}  // namespace qsynth::app
