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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "qsynth/analyzer/whitelist.hpp"
#include "qsynth/app/config.hpp"
#include "qsynth/app/manifest.hpp"
#include "qsynth/app/stages.hpp"
#include "qsynth/corpus/instruct.hpp"
#include "qsynth/corpus/profile.hpp"
#include "qsynth/eval/report.hpp"
#include "qsynth/rag/challenge.hpp"
#include "qsynth/rag/pipeline.hpp"
#include "qsynth/retrieval/index.hpp"
#include "qsynth/sandbox/classify.hpp"
#include "qsynth/sandbox/executor.hpp"
#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qsynth;

namespace {

constexpr const char* kDefaultConfig = "config/qsynth.json";

struct Overrides {
    std::string config;
    std::optional<double> tau;
    std::optional<std::size_t> k;
    std::optional<int> max_fixes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> provider;
    std::optional<unsigned> workers;
    std::optional<double> threshold;
};

struct Sources {
    std::string manifest;
    std::string dir;
    std::string category = "community";
};

app::Config load_config(const Overrides& o) {
    app::Config cfg;
    if (!o.config.empty()) cfg = app::Config::load(o.config);
    else if (fs::exists(kDefaultConfig)) cfg = app::Config::load(kDefaultConfig);
    if (o.tau) cfg.rag.tau = *o.tau;
    if (o.k) cfg.rag.k = *o.k;
    if (o.max_fixes) cfg.rag.max_fixes = *o.max_fixes;
    if (o.seed) cfg.seed = *o.seed;
    if (o.provider) cfg.provider = *o.provider;
    if (o.workers) cfg.workers = *o.workers;
    if (o.threshold) cfg.dedup_threshold = *o.threshold;
    cfg.validate();
    return cfg;
}

std::vector<corpus::SourceRecord> load_sources(const Sources& s) {
    if (s.manifest.empty() == s.dir.empty()) throw ValidationError("give exactly one of --sources or --dir");
    if (!s.manifest.empty()) return corpus::load_manifest(s.manifest);
    return corpus::scan_directory(s.dir, corpus::parse_category(s.category));
}

// Manifest plus the state shared by every command.
class Run {
public:
    Run(std::string command, std::vector<std::string> argv, const Overrides& o) : cfg_(load_config(o)) {
        m_.command = std::move(command);
        m_.argv = std::move(argv);
        m_.config = cfg_.to_json();
        m_.seed = cfg_.seed;
        m_.started_at = io::utc_timestamp();
    }

    const app::Config& cfg() const { return cfg_; }
    app::RunManifest& manifest() { return m_; }

    void set_manifest_path(fs::path p) { manifest_path_ = std::move(p); }
    const fs::path& manifest_path() const { return manifest_path_; }

    llm::Gateway& gateway() {
        if (!gateway_) gateway_ = std::make_unique<llm::Gateway>(app::make_chat_provider(cfg_), cfg_.gateway);
        return *gateway_;
    }

    template <typename T>
    void absorb(const app::StageOutput<T>& out, const std::string& stage) {
        m_.stats[stage] = out.stats;
        for (const auto& w : out.warnings) m_.warnings.push_back(stage + ": " + w);
        if (out.partial) m_.status = "partial";
    }

    void output(const std::string& key, const fs::path& p) { m_.outputs[key] = p.string(); }
    void input(const std::string& key, const fs::path& p) { m_.inputs[key] = p.string(); }

    void finish() {
        if (gateway_) m_.stats["llm"] = {{"provider", gateway_->provider().id()}, {"calls", gateway_->calls()}, {"attempts", gateway_->attempts()}};
        if (!manifest_path_.empty()) m_.write(manifest_path_);
    }

private:
    app::Config cfg_;
    app::RunManifest m_;
    fs::path manifest_path_;
    std::unique_ptr<llm::Gateway> gateway_;
};

fs::path manifest_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

analyzer::Whitelist whitelist(const app::Config& cfg) {
    return analyzer::Whitelist::parse(io::load_resource("whitelist.txt", cfg.resources_dir), "whitelist.txt");
}

sandbox::ClassifierRules classifier_rules(const app::Config& cfg) {
    return sandbox::ClassifierRules::parse(io::load_resource("classifier_rules.txt", cfg.resources_dir));
}

void write_rows(Run& run, const std::string& key, const fs::path& p, const std::vector<json>& rows) {
    ensure_parent(p);
    io::write_jsonl(p, rows);
    run.output(key, p);
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

// Commands.

void cmd_extract(Run& run, const Sources& src, const fs::path& out) {
    run.set_manifest_path(manifest_for(out));
    auto records = load_sources(src);
    run.input("sources", src.manifest.empty() ? src.dir : src.manifest);
    auto r = app::run_extract(records, run.cfg());
    run.absorb(r, "extract");
    write_rows(run, "functions", out, app::to_rows(r.items));
    std::cout << "extracted " << r.items.size() << " functions from " << records.size() << " files\n";
}

void cmd_verify(Run& run, const fs::path& in, const fs::path& out, const std::string& reports, bool no_modernize) {
    run.set_manifest_path(manifest_for(out));
    run.input("functions", in);
    auto fns = app::read_functions(in);
    bool modernize = run.cfg().modernize && !no_modernize;
    auto r = app::run_verify(fns, modernize ? &run.gateway() : nullptr, run.cfg());
    run.absorb(r, "verify");
    write_rows(run, "verified", out, app::to_rows(r.items));
    if (!reports.empty()) write_rows(run, "reports", reports, r.reports);
    std::cout << "verified " << r.items.size() << " of " << fns.size() << " functions\n";
}

void cmd_dedup(Run& run, const fs::path& in, const fs::path& out, const std::string& dups) {
    run.set_manifest_path(manifest_for(out));
    run.input("entries", in);
    auto entries = app::read_pairs(in);
    auto r = app::run_dedup(entries, run.cfg());
    run.absorb(r, "dedup");
    write_rows(run, "deduped", out, app::to_rows(r.items));
    if (!dups.empty()) {
        std::vector<json> rows;
        for (const auto& d : r.duplicates)
            rows.push_back({{"removed", d.removed_id}, {"survivor", d.survivor_id}, {"jaccard", d.jaccard}});
        write_rows(run, "duplicates", dups, rows);
    }
    std::cout << "retained " << r.items.size() << " of " << entries.size() << " entries\n";
}

void cmd_instruct(Run& run, const fs::path& in, const fs::path& out) {
    run.set_manifest_path(manifest_for(out));
    run.input("entries", in);
    auto r = app::run_instruct(app::read_pairs(in), run.gateway(), run.cfg());
    run.absorb(r, "instruct");
    write_rows(run, "pairs", out, app::to_rows(r.items));
    std::cout << "paired " << r.stats["paired"].get<std::size_t>() << " of " << r.items.size() << " entries\n";
}

void cmd_build(Run& run, const Sources& src, const fs::path& dir, bool no_modernize) {
    fs::create_directories(dir);
    run.set_manifest_path(dir / "manifest.json");
    run.input("sources", src.manifest.empty() ? src.dir : src.manifest);
    auto records = load_sources(src);
    auto ex = app::run_extract(records, run.cfg());
    run.absorb(ex, "extract");
    write_rows(run, "functions", dir / "functions.jsonl", app::to_rows(ex.items));
    bool modernize = run.cfg().modernize && !no_modernize;
    auto ve = app::run_verify(ex.items, modernize ? &run.gateway() : nullptr, run.cfg());
    run.absorb(ve, "verify");
    write_rows(run, "verified", dir / "verified.jsonl", app::to_rows(ve.items));
    write_rows(run, "reports", dir / "verify_reports.jsonl", ve.reports);
    auto de = app::run_dedup(ve.items, run.cfg());
    run.absorb(de, "dedup");
    write_rows(run, "deduped", dir / "deduped.jsonl", app::to_rows(de.items));
    auto in = app::run_instruct(de.items, run.gateway(), run.cfg());
    run.absorb(in, "instruct");
    write_rows(run, "pairs", dir / "pairs.jsonl", app::to_rows(in.items));
    std::cout << records.size() << " files, " << ex.items.size() << " functions, " << ve.items.size() << " verified, "
              << de.items.size() << " unique, " << in.stats["paired"].get<std::size_t>() << " paired\n";
}

void cmd_index(Run& run, const fs::path& in, const fs::path& out, bool check) {
    fs::create_directories(out);
    run.set_manifest_path(out / "run_manifest.json");
    run.input("pairs", in);
    std::vector<corpus::InstructionPair> pairs;
    std::size_t skipped = 0;
    for (auto& p : app::read_pairs(in)) {
        if (p.instruction.empty()) ++skipped;
        else pairs.push_back(std::move(p));
    }
    if (skipped) run.manifest().warnings.push_back(std::to_string(skipped) + " unpaired entries not indexed");
    auto embedder = app::make_embedding_provider(run.cfg());
    auto kb = retrieval::KnowledgeBase::build(pairs, *embedder, run.cfg().seed);
    kb.save(out);
    run.output("knowledge_base", out);
    json stats = {{"indexed", pairs.size()}, {"skipped_unpaired", skipped}, {"provider", embedder->id()}, {"dim", embedder->dim()}};
    if (check && !pairs.empty()) {
        auto c = corpus::consistency_check(kb.pairs(), kb, *embedder);
        stats["consistency"] = {{"top1", c.top1}, {"top5", c.top5}, {"queries", c.queries}, {"top1_misses", c.top1_misses}};
        std::cout << "top-1 " << pct(100 * c.top1) << "%  top-5 " << pct(100 * c.top5) << "%\n";
    }
    run.manifest().stats["index"] = stats;
    std::cout << "indexed " << pairs.size() << " pairs with " << embedder->id() << "\n";
}

void cmd_retrieve(Run& run, const fs::path& kb_dir, const std::string& query) {
    auto kb = retrieval::KnowledgeBase::load(kb_dir);
    auto embedder = app::make_embedding_provider(run.cfg());
    auto r = kb.retrieve(query, *embedder, run.cfg().rag.k);
    for (const auto& p : r.pairs)
        std::cout << json{{"id", p.pair->id}, {"score", p.score}, {"instruction", p.pair->instruction}}.dump() << "\n";
}

void cmd_solve(Run& run, const fs::path& root, const std::string& kb_dir, const fs::path& out, std::optional<std::size_t> runs,
               bool no_retrieval, bool no_expand, const std::string& shim) {
    run.set_manifest_path(manifest_for(out));
    run.input("challenges", root);
    app::Config cfg = run.cfg();
    if (no_retrieval) cfg.rag.retrieval = false;
    if (no_expand) cfg.rag.expand = false;
    if (!shim.empty()) cfg.shim = shim;
    if (runs) cfg.runs = *runs;
    if (cfg.shim.empty()) throw ValidationError("no test shim configured (executor.shim or --shim)");
    if (cfg.rag.retrieval && kb_dir.empty()) throw ValidationError("retrieval needs --kb (or pass --no-retrieval)");
    cfg.validate();
    run.manifest().config = cfg.to_json();

    auto tasks = rag::load_challenges(root);
    std::optional<retrieval::KnowledgeBase> kb;
    auto embedder = app::make_embedding_provider(cfg);
    if (cfg.rag.retrieval) {
        kb.emplace(retrieval::KnowledgeBase::load(kb_dir));
        run.input("knowledge_base", kb_dir);
    }
    sandbox::SubprocessExecutor executor(app::executor_options(cfg));
    auto wl = whitelist(cfg);
    auto rules = classifier_rules(cfg);
    rag::SolveContext ctx;
    ctx.gateway = &run.gateway();
    ctx.executor = &executor;
    ctx.knowledge = kb ? &*kb : nullptr;
    ctx.embedder = embedder.get();
    ctx.whitelist = &wl;
    ctx.rules = &rules;
    ctx.templates = rag::PromptTemplates::load(cfg.resources_dir);

    std::vector<json> rows;
    json per_run = json::array();
    std::size_t errors = 0;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
        auto outcomes = rag::solve_all(tasks, ctx, cfg.rag, cfg.effective_workers());
        std::size_t passes = 0;
        for (const auto& o : outcomes) {
            json j = o.to_json();
            j["run"] = r;
            rows.push_back(std::move(j));
            passes += o.final_pass;
            if (!o.error.empty()) {
                ++errors;
                run.manifest().warnings.push_back(o.challenge_id + " run " + std::to_string(r) + ": " + o.error);
            }
            for (const auto& a : o.attempts)
                if (a.execution && a.execution->exit_kind == sandbox::ExitKind::LaunchFailure)
                    throw Error("executor launch failed: " + a.execution->stderr_text);
        }
        per_run.push_back({{"run", r}, {"passed", passes}, {"challenges", outcomes.size()}});
        std::cout << "run " << r << ": " << passes << "/" << outcomes.size() << " passed\n";
    }
    if (errors) run.manifest().status = "partial";
    run.manifest().stats["solve"] = {{"runs", per_run}, {"gateway_errors", errors}};
    write_rows(run, "traces", out, rows);
}

void cmd_eval(Run& run, const fs::path& traces, const fs::path& root, const std::string& out, std::optional<std::size_t> pass_k) {
    run.input("traces", traces);
    run.input("challenges", root);
    std::vector<eval::TraceRun> runs;
    for (const auto& row : io::read_jsonl(traces)) runs.push_back(eval::parse_trace(row));
    std::map<std::string, std::string> refs;
    for (const auto& t : rag::load_challenges(root))
        if (!t.reference_code.empty()) refs[t.id] = t.reference_code;
    auto rep = eval::evaluate(runs, refs, whitelist(run.cfg()), pass_k.value_or(run.cfg().eval_k), run.cfg().effective_workers());
    std::cout << rep.table();
    if (!out.empty()) {
        ensure_parent(out);
        io::write_file_atomic(out, rep.to_json().dump(2) + "\n");
        run.output("report", out);
        run.set_manifest_path(manifest_for(out));
    }
    run.manifest().stats["eval"] = rep.to_json()["aggregate"];
    run.manifest().warnings.insert(run.manifest().warnings.end(), rep.warnings.begin(), rep.warnings.end());
}

void cmd_profile(Run& run, const fs::path& in, const std::string& out) {
    run.input("corpus", in);
    auto c = corpus::profile_jsonl(in);
    std::cout << "source     count   share\n";
    for (auto cat : {corpus::SourceCategory::Official, corpus::SourceCategory::Community, corpus::SourceCategory::Archive}) {
        auto i = static_cast<std::size_t>(cat);
        std::string name(corpus::to_string(cat));
        name.resize(10, ' ');
        std::string count = std::to_string(c.counts[i]);
        count.resize(7, ' ');
        std::cout << name << " " << count << " " << pct(c.percent[i]) << "%\n";
    }
    std::cout << "total      " << c.total << "\n";
    run.manifest().stats["profile"] = c.to_json();
    if (!out.empty()) {
        ensure_parent(out);
        io::write_file_atomic(out, c.to_json().dump(2) + "\n");
        run.output("profile", out);
        run.set_manifest_path(manifest_for(out));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qsynth: PennyLane corpus synthesis, retrieval and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config, "Config file (default config/qsynth.json when present)");
    app.add_option("--tau", o.tau, "Retrieval similarity threshold");
    app.add_option("--k", o.k, "Retrieved examples");
    app.add_option("--max-fixes", o.max_fixes, "Repair rounds after the first attempt");
    app.add_option("--seed", o.seed, "Root seed");
    app.add_option("--provider", o.provider, "Chat provider name from the config");
    app.add_option("--workers", o.workers, "Worker threads (0: one per core)");

    Sources src;
    auto add_sources = [&](CLI::App* s) {
        s->add_option("--sources", src.manifest, "Source manifest (JSONL or TSV)");
        s->add_option("--dir", src.dir, "Directory of .py files");
        s->add_option("--category", src.category, "Category for --dir: official, community or archive");
    };

    std::string in, out, aux, kb, query, shim;
    bool flag_a = false, flag_b = false;
    std::optional<std::size_t> count;

    auto* extract = app.add_subcommand("extract", "Extract quantum functions from source files");
    add_sources(extract);
    extract->add_option("--out", out, "functions.jsonl")->required();

    auto* verify = app.add_subcommand("verify", "Modernize and verify extracted functions");
    verify->add_option("--in", in, "functions.jsonl")->required();
    verify->add_option("--out", out, "verified.jsonl")->required();
    verify->add_option("--reports", aux, "Per-function verification reports (JSONL)");
    verify->add_flag("--no-modernize", flag_a, "Verify originals only");

    auto* dedup = app.add_subcommand("dedup", "Remove near-duplicate entries");
    dedup->add_option("--in", in, "verified.jsonl")->required();
    dedup->add_option("--out", out, "deduped.jsonl")->required();
    dedup->add_option("--threshold", o.threshold, "Jaccard threshold");
    dedup->add_option("--duplicates", aux, "Removed entries with their survivors (JSONL)");

    auto* instruct = app.add_subcommand("instruct", "Generate instructions for entries");
    instruct->add_option("--in", in, "deduped.jsonl")->required();
    instruct->add_option("--out", out, "pairs.jsonl")->required();

    auto* build = app.add_subcommand("build", "extract, verify, dedup and instruct in one run");
    add_sources(build);
    build->add_option("--out-dir", out, "Output directory")->required();
    build->add_option("--threshold", o.threshold, "Dedup Jaccard threshold");
    build->add_flag("--no-modernize", flag_a, "Verify originals only");

    auto* index = app.add_subcommand("index", "Embed pairs into a knowledge base");
    index->add_option("--in", in, "pairs.jsonl")->required();
    index->add_option("--out", out, "Knowledge base directory")->required();
    index->add_flag("--check", flag_a, "Run the self-retrieval consistency check");

    auto* retrieve = app.add_subcommand("retrieve", "Query a knowledge base");
    retrieve->add_option("--kb", kb, "Knowledge base directory")->required();
    retrieve->add_option("query", query, "Query text")->required();

    auto* solve = app.add_subcommand("solve", "Generate and test solutions for challenges");
    solve->add_option("--challenges", in, "Challenge root directory")->required();
    solve->add_option("--kb", kb, "Knowledge base directory");
    solve->add_option("--out", out, "traces.jsonl")->required();
    solve->add_option("--runs", count, "Independent runs per challenge");
    solve->add_option("--shim", shim, "Test shim script");
    solve->add_flag("--no-retrieval", flag_a, "Baseline without retrieval");
    solve->add_flag("--no-expand", flag_b, "Use descriptions as queries");

    auto* evaluate = app.add_subcommand("eval", "Score solve traces");
    evaluate->add_option("--traces", in, "traces.jsonl")->required();
    evaluate->add_option("--challenges", aux, "Challenge root directory (reference.py per challenge)")->required();
    evaluate->add_option("--out", out, "report.json");
    evaluate->add_option("--pass-k", count, "k for pass@k");

    auto* profile = app.add_subcommand("profile", "Source composition of a corpus file");
    profile->add_option("--in", in, "Any corpus JSONL with a category field")->required();
    profile->add_option("--out", out, "profile.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    std::vector<std::string> args(argv, argv + argc);
    auto* sub = app.get_subcommands().front();
    std::unique_ptr<Run> run;
    try {
        run = std::make_unique<Run>(sub->get_name(), args, o);
        if (sub == extract) cmd_extract(*run, src, out);
        else if (sub == verify) cmd_verify(*run, in, out, aux, flag_a);
        else if (sub == dedup) cmd_dedup(*run, in, out, aux);
        else if (sub == build) cmd_build(*run, src, out, flag_a);
        else if (sub == instruct) cmd_instruct(*run, in, out);
        else if (sub == index) cmd_index(*run, in, out, flag_a);
        else if (sub == retrieve) cmd_retrieve(*run, kb, query);
        else if (sub == solve) cmd_solve(*run, in, kb, out, count, flag_a, flag_b, shim);
        else if (sub == evaluate) cmd_eval(*run, in, aux, out, count);
        else if (sub == profile) cmd_profile(*run, in, out);
        run->finish();
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (run && !run->manifest_path().empty()) {
            run->manifest().status = "failed";
            run->manifest().warnings.push_back(e.what());
            try {
                run->finish();
            } catch (const std::exception&) {
            }
        }
        return 2;
    }
}
