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

// Acceptance checks. One line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qsynth/analyzer/features.hpp"
#include "qsynth/analyzer/whitelist.hpp"
#include "qsynth/corpus/instruct.hpp"
#include "qsynth/corpus/profile.hpp"
#include "qsynth/corpus/stage1.hpp"
#include "qsynth/corpus/stage2.hpp"
#include "qsynth/corpus/stage3.hpp"
#include "qsynth/eval/metrics.hpp"
#include "qsynth/llm/providers.hpp"
#include "qsynth/rag/pipeline.hpp"
#include "qsynth/retrieval/embedding.hpp"
#include "qsynth/retrieval/index.hpp"
#include "qsynth/sandbox/classify.hpp"
#include "qsynth/util/io.hpp"

namespace fs = std::filesystem;
using namespace qsynth;

namespace {

// Tolerances.
constexpr double kDfTol = 1e-12;
constexpr double kCodeBleuTol = 1e-9;
constexpr double kBleuOracleTol = 1e-6;
constexpr double kMinHashErr = 0.10;
constexpr double kMinHashShare = 0.95;
constexpr double kTop1Min = 0.95;
constexpr double kProfileTol = 0.1;

// Runtime limits in seconds.
constexpr double kGoldenLimit = 1.0;
constexpr double kDedupLimit = 10.0;
constexpr double kRetrievalLimit = 30.0;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) detail << "; ";
            else detail.str("");
            ok = false;
            detail << what;
        }
    }
};

std::string fixture(const std::string& name) { return io::read_file(std::string(QSYNTH_FIXTURE_DIR) + "/" + name); }

llm::GatewayOptions no_sleep() {
    llm::GatewayOptions o;
    o.sleep = [](std::chrono::milliseconds) {};
    return o;
}

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

// 1. Entry #32 through extract, scripted modernize and verify.
void entry32_golden(Outcome& o) {
    corpus::SourceRecord rec;
    rec.id = "quantum_classifier.py";
    rec.category = corpus::SourceCategory::Community;
    rec.raw_text = fixture("quantum_classifier.py");
    const corpus::ExtractedFunction* fn = nullptr;
    auto ex = corpus::extract(rec);
    for (const auto& f : ex.functions)
        if (f.name == "quantum_circuit") fn = &f;
    o.require(fn != nullptr, "quantum_circuit not extracted");
    if (!fn) return;
    o.require(fn->classification == corpus::Classification::Direct, "quantum_circuit not classified direct");

    auto mock = std::make_shared<llm::ScriptedProvider>();
    mock->enqueue("```python\n" + fixture("entries/entry32_modernized.py") + "```");
    llm::Gateway gw(mock, no_sleep());
    corpus::Stage2Options opts;
    opts.modernize = true;
    auto out = corpus::process(*fn, &gw, opts);
    const auto& r = out.report;
    o.require(out.modernization_attempted, "modernization not attempted");
    o.require(r.verdict == corpus::Verdict::TransformedValid, "verdict " + std::string(corpus::to_string(r.verdict)));
    o.require(r.transformed_features.has_value(), "no transformed features");
    if (!r.transformed_features) return;
    const auto& a = r.original_features;
    const auto& b = *r.transformed_features;
    o.require(a.deprecated_count == 2 && b.deprecated_count == 0, "deprecated " + std::to_string(a.deprecated_count) + "->" +
                                                                      std::to_string(b.deprecated_count));
    o.require(a.qml_call_count == 4 && b.qml_call_count == 4,
              "qml total " + std::to_string(a.qml_call_count) + "->" + std::to_string(b.qml_call_count));
    o.require(a.measurement_count == 1 && b.measurement_count == 1, "measurements " + std::to_string(a.measurement_count) +
                                                                        "->" + std::to_string(b.measurement_count));
    auto rtrim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
    };
    o.require(rtrim(out.entry.code) == rtrim(fixture("entries/entry32_modernized.py")), "entry code is not the modernized listing");
    if (o.ok) o.detail << "transformed_valid, deprecated 2->0, qml total 4->4, measurements 1->1";
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::string> out;
    std::uniform_int_distribution<int> d(0, 5000);
    for (std::size_t i = 0; i < n; ++i) out.push_back("t" + std::to_string(d(rng)));
    return out;
}

// 2. Dedup decisions on the entry pair plus MinHash estimator accuracy.
void dedup_fixture(Outcome& o) {
    auto e32 = fixture("entries/entry32_modernized.py");
    auto e265 = fixture("entries/entry265.py");
    corpus::DedupOptions opts;
    opts.threshold = 0.70;
    auto r = corpus::dedup({{"32", e32}, {"265", e265}}, opts);
    o.require(r.retained == std::vector<std::size_t>{0, 1}, "entries 32/265 not both retained");
    auto r2 = corpus::dedup({{"32", e32}, {"265", e265}, {"265-copy", e265}}, opts);
    o.require(r2.retained == std::vector<std::size_t>{0, 1} && r2.duplicates.size() == 1 &&
                  r2.duplicates[0].removed_id == "265-copy" && r2.duplicates[0].survivor_id == "265",
              "byte-identical copy not removed");

    std::mt19937_64 rng(20250101);
    std::uniform_int_distribution<std::size_t> len(20, 300);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    const int pairs = 200;
    int within = 0;
    for (int p = 0; p < pairs; ++p) {
        auto a = random_tokens(rng, len(rng));
        auto b = a;
        std::uniform_int_distribution<std::size_t> pos(0, b.size() - 1);
        auto edits = static_cast<std::size_t>(frac(rng) * static_cast<double>(b.size()) / 2.0);
        for (std::size_t e = 0; e < edits; ++e) b[pos(rng)] = "m" + std::to_string(rng() % 100000);
        auto sa = corpus::shingle_tokens(a);
        auto sb = corpus::shingle_tokens(b);
        // exact Jaccard by brute-force membership counting
        std::size_t inter = 0;
        for (const auto& s : sa.shingles) inter += std::find(sb.shingles.begin(), sb.shingles.end(), s) != sb.shingles.end();
        double exact = static_cast<double>(inter) / static_cast<double>(sa.shingles.size() + sb.shingles.size() - inter);
        double est = corpus::estimate_jaccard(corpus::signature(sa), corpus::signature(sb));
        within += std::fabs(est - exact) <= kMinHashErr;
    }
    double share = static_cast<double>(within) / pairs;
    o.require(share >= kMinHashShare, "MinHash within 0.10 on only " + fmt(share * 100, 1) + "% of pairs");
    if (o.ok) o.detail << "32/265 retained, copy removed, MinHash within 0.10 on " << within << "/" << pairs << " pairs";
}

// Code whose quantum key set is exactly gates ∪ devices ∪ measurements.
std::string render_features(const std::set<std::string>& gates, const std::set<std::string>& devices,
                            const std::set<std::string>& meas) {
    std::string s = "import pennylane as qml\n\nH = None\n";
    int i = 0;
    for (const auto& d : devices) s += "dev" + std::to_string(i++) + " = qml.device(\"" + d + "\", wires=2)\n";
    s += "\n\ndef circuit(x):\n    y = x\n";
    for (const auto& g : gates) s += "    qml." + g + "(wires=0)\n";
    if (meas.empty()) {
        s += "    return y\n";
    } else {
        std::vector<std::string> parts;
        for (const auto& m : meas) parts.push_back("qml." + m + (m == "expval" || m == "var" ? "(H)" : "(wires=0)"));
        s += "    return ";
        for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? ", " : "") + parts[k];
        s += "\n";
    }
    return s;
}

double set_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::vector<std::string> i, u;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(i));
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    return static_cast<double>(i.size()) / static_cast<double>(u.size());
}

// 3. Dataflow match.
void dataflow_suite(Outcome& o) {
    auto h = render_features({"RX", "PauliZ"}, {"default.qubit"}, {});
    auto r = render_features({"RX", "PauliZ"}, {"default.qubit"}, {"expval"});
    std::set<std::string> kh = {"RX", "PauliZ", "default.qubit"};
    std::set<std::string> kr = {"RX", "PauliZ", "default.qubit", "expval"};
    o.require(eval::dataflow_keys(h) == kh && eval::dataflow_keys(r) == kr, "fixture key sets differ from the stated sets");
    o.require(std::fabs(eval::dataflow_match(r, r) - 1.0) <= kDfTol, "identity != 1");
    auto other = render_features({"CNOT", "Hadamard"}, {"lightning.qubit"}, {"probs"});
    o.require(std::fabs(eval::dataflow_match(other, r)) <= kDfTol, "disjoint != 0");
    double three_of_four = eval::dataflow_match(h, r);
    o.require(std::fabs(three_of_four - 0.75) <= kDfTol, "3-of-4 overlap gave " + fmt(three_of_four, 12));

    const std::vector<std::string> gates = {"RX", "RY", "RZ", "CNOT", "Hadamard", "CZ", "Toffoli", "SWAP", "PauliX", "PauliZ"};
    const std::vector<std::string> devs = {"default.qubit", "lightning.qubit", "default.mixed"};
    const std::vector<std::string> meas = {"expval", "probs", "sample", "state", "var", "counts"};
    std::mt19937_64 rng(4242);
    auto pick = [&](const std::vector<std::string>& pool) {
        std::set<std::string> s;
        for (const auto& x : pool)
            if (rng() % 3 == 0) s.insert(x);
        return s;
    };
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        auto g1 = pick(gates), d1 = pick(devs), m1 = pick(meas);
        auto g2 = pick(gates), d2 = pick(devs), m2 = pick(meas);
        std::set<std::string> k1 = g1, k2 = g2;
        k1.insert(d1.begin(), d1.end());
        k1.insert(m1.begin(), m1.end());
        k2.insert(d2.begin(), d2.end());
        k2.insert(m2.begin(), m2.end());
        auto c1 = render_features(g1, d1, m1);
        auto c2 = render_features(g2, d2, m2);
        double ab = eval::dataflow_match(c1, c2), ba = eval::dataflow_match(c2, c1);
        double expect = set_jaccard(k1, k2);
        if (std::fabs(ab - ba) > kDfTol || std::fabs(ab - expect) > kDfTol) {
            o.require(false, "random pair " + std::to_string(t) + ": DF " + fmt(ab, 6) + "/" + fmt(ba, 6) + " vs " + fmt(expect, 6));
            break;
        }
        ++checked;
    }
    if (o.ok) o.detail << "identity 1, disjoint 0, overlap 0.75, " << checked << " random pairs symmetric and exact";
}

std::string random_program(std::mt19937_64& rng) {
    const std::vector<std::string> gates = {"RX", "RY", "RZ", "CNOT", "Hadamard", "CZ", "templates.AngleEmbedding", "FakeOp"};
    const std::vector<std::string> meas = {"expval", "probs", "sample", "state"};
    const std::vector<std::string> devs = {"default.qubit", "lightning.qubit"};
    std::string s = "import pennylane as qml\n";
    if (rng() % 2) s += "dev = qml.device(\"" + devs[rng() % devs.size()] + "\", wires=" + std::to_string(1 + rng() % 4) + ")\n";
    s += "\n\ndef f" + std::to_string(rng() % 5) + "(x, w):\n";
    std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
        switch (rng() % 4) {
            case 0: s += "    qml." + gates[rng() % gates.size()] + "(x, wires=" + std::to_string(rng() % 3) + ")\n"; break;
            case 1: s += "    y = x * " + std::to_string(rng() % 7) + " + w\n"; break;
            case 2:
                s += "    for i in range(" + std::to_string(1 + rng() % 4) + "):\n        qml." + gates[rng() % gates.size()] +
                     "(w, wires=i)\n";
                break;
            default: s += "    x = x + 1\n"; break;
        }
    }
    s += "    return qml." + meas[rng() % meas.size()] + "(wires=0)\n";
    return s;
}

struct BleuOracle {
    const char* pair;
    double bleu;
};

// Reference values from an independent BLEU script over the same token
// streams (tests/oracles/metrics_oracle.py).
const BleuOracle kBleuOracle[] = {
    {"01", 0.904565847117}, {"02", 0.763012402292}, {"03", 0.836204648929}, {"04", 0.20291306102},
    {"05", 0.754900016766}, {"06", 0.906357087725}, {"07", 0.091594865588}, {"08", 0.120206716309},
    {"09", 5.20852e-07},    {"10", 0.884267073138},
};

// 4. CodeBLEU composition, identity, upweighting monotonicity, BLEU oracle.
void codebleu_suite(Outcome& o) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t) {
        auto h = random_program(rng);
        auto r = random_program(rng);
        auto m = eval::compute_metrics(h, r);
        double mean = 0.25 * (m.token_bleu + m.weighted_bleu + m.ast_match + m.dataflow_match);
        if (std::fabs(m.codebleu - mean) > kCodeBleuTol) {
            o.require(false, "random pair " + std::to_string(t) + ": codebleu off mean by " + fmt(std::fabs(m.codebleu - mean), 12));
            break;
        }
        for (double v : {m.token_bleu, m.weighted_bleu, m.ast_match, m.dataflow_match, m.codebleu, m.rouge_l})
            if (v < 0 || v > 1) o.require(false, "metric out of [0,1] on random pair " + std::to_string(t));
    }
    for (const char* f : {"metrics/ref01.py", "metrics/ref05.py", "metrics/ref08.py"}) {
        auto code = fixture(f);
        o.require(std::fabs(eval::compute_metrics(code, code).codebleu - 1.0) <= kCodeBleuTol, std::string("identity on ") + f);
    }
    auto ref = fixture("metrics/mono_ref.py");
    double wq = eval::weighted_bleu(fixture("metrics/mono_qml.py"), ref);
    double wp = eval::weighted_bleu(fixture("metrics/mono_plain.py"), ref);
    o.require(wq >= wp, "upweighting not monotone: " + fmt(wq) + " < " + fmt(wp));
    double worst = 0;
    for (const auto& row : kBleuOracle) {
        double v = eval::token_bleu(fixture(std::string("metrics/hyp") + row.pair + ".py"),
                                    fixture(std::string("metrics/ref") + row.pair + ".py"));
        worst = std::max(worst, std::fabs(v - row.bleu));
    }
    o.require(worst <= kBleuOracleTol, "token_bleu off reference by " + fmt(worst, 9));
    if (o.ok)
        o.detail << "50 random pairs mean-consistent, identity 1, weighted " << fmt(wq) << " >= " << fmt(wp)
                 << ", BLEU oracle max diff " << std::scientific << worst;
}

// 5. ROUGE-L.
void rouge_suite(Outcome& o) {
    double v = eval::rouge_l(std::vector<std::string>{"a", "c", "e"}, {"a", "b", "c", "d", "e"});
    o.require(v == 0.75, "[a,c,e]/[a,b,c,d,e] gave " + fmt(v, 17));
    auto code = fixture("metrics/ref02.py");
    o.require(eval::rouge_l(code, code) == 1.0, "identity != 1");
    o.require(eval::rouge_l("alpha beta gamma", "delta epsilon") == 0.0, "disjoint != 0");
    if (o.ok) o.detail << "0.75, identity 1, disjoint 0";
}

std::vector<corpus::InstructionPair> synthetic_pairs(std::size_t n, std::uint64_t seed) {
    const std::vector<std::string> gates = {"RX", "RY", "RZ", "CNOT", "Hadamard", "CZ", "Toffoli", "SWAP", "PhaseShift", "CRX"};
    const std::vector<std::string> templ = {"AngleEmbedding", "AmplitudeEmbedding", "StronglyEntanglingLayers",
                                            "BasicEntanglerLayers", "QFT"};
    const std::vector<std::string> meas = {"expval", "probs", "sample", "state", "var"};
    const std::vector<std::string> verbs = {"Implement", "Build", "Construct", "Create", "Design", "Write"};
    std::mt19937_64 rng(seed);
    std::vector<corpus::InstructionPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g1 = gates[rng() % gates.size()];
        const auto& g2 = gates[rng() % gates.size()];
        const auto& t = templ[rng() % templ.size()];
        const auto& m = meas[rng() % meas.size()];
        std::size_t wires = 2 + rng() % 7;
        std::string fn = "circuit_" + std::to_string(i);
        corpus::InstructionPair p;
        p.id = "p" + std::to_string(10000 + i);
        p.instruction = verbs[rng() % verbs.size()] + " a PennyLane QNode named " + fn + " on " + std::to_string(wires) +
                        " wires that applies " + t + " followed by " + g1 + " and " + g2 + " gates, and returns the " + m +
                        " measurement of the final state.";
        p.code = "def " + fn + "(x):\n    qml." + t + "(x, wires=range(" + std::to_string(wires) + "))\n    qml." + g1 +
                 "(0.1, wires=0)\n    qml." + g2 + "(wires=[0, 1])\n    return qml." + m + "(wires=0)\n";
        out.push_back(p);
    }
    return out;
}

// 6. Self-retrieval consistency and exhaustive-scan equivalence.
void retrieval_suite(Outcome& o) {
    retrieval::HashingEmbeddingProvider provider;
    auto pairs = synthetic_pairs(100, 7);
    auto kb = retrieval::KnowledgeBase::build(pairs, provider);
    auto c = corpus::consistency_check(pairs, kb, provider);
    o.require(c.queries == 100, "consistency ran " + std::to_string(c.queries) + " queries");
    o.require(c.top1 >= kTop1Min, "top-1 " + fmt(c.top1 * 100, 1) + "%");
    o.require(c.top5 == 1.0, "top-5 " + fmt(c.top5 * 100, 1) + "%");

    auto big = synthetic_pairs(1000, 8);
    auto kb2 = retrieval::KnowledgeBase::build(big, provider);
    std::vector<std::vector<float>> vecs;
    for (const auto& p : big) {
        auto e = provider.embed(retrieval::pair_text(p));
        vecs.emplace_back(e.values.begin(), e.values.end());
    }
    std::mt19937_64 rng(3);
    int mismatches = 0;
    for (int q = 0; q < 50; ++q) {
        auto query = provider.embed(big[rng() % big.size()].instruction);
        std::vector<float> qf(query.values.begin(), query.values.end());
        std::vector<std::pair<double, std::string>> ranked;
        for (std::size_t i = 0; i < big.size(); ++i) {
            double dot = 0, na = 0, nb = 0;
            for (std::size_t d = 0; d < qf.size(); ++d) {
                dot += static_cast<double>(qf[d]) * vecs[i][d];
                na += static_cast<double>(qf[d]) * qf[d];
                nb += static_cast<double>(vecs[i][d]) * vecs[i][d];
            }
            ranked.push_back({-(dot / (std::sqrt(na) * std::sqrt(nb))), big[i].id});
        }
        std::sort(ranked.begin(), ranked.end());
        auto got = kb2.index().query(query, big.size());
        for (std::size_t i = 0; i < got.hits.size(); ++i)
            if (got.hits[i].id != ranked[i].second || std::fabs(got.hits[i].score + ranked[i].first) > 1e-12) ++mismatches;
        if (got.hits.size() != big.size()) ++mismatches;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " ranking mismatches against the brute-force scan");
    if (o.ok)
        o.detail << "top-1 " << fmt(c.top1 * 100, 1) << "%, top-5 " << fmt(c.top5 * 100, 1)
                 << "%, full 1000-pair rankings identical to exhaustive scan on 50 queries";
}

class MarkerExecutor : public sandbox::Executor {
public:
    sandbox::ExecutionResult execute(std::string_view code, const rag::ChallengeTask&,
                                     std::optional<std::chrono::duration<double>>) override {
        sandbox::ExecutionResult r;
        r.exit_kind = sandbox::ExitKind::Ok;
        bool pass = code.find("PASS") != std::string_view::npos;
        sandbox::finalize(r, std::vector<sandbox::TestOutcome>{{"test_main", pass, pass ? "" : "AssertionError: wrong value"}});
        return r;
    }
};

std::size_t generation_calls(const llm::ScriptedProvider& mock) {
    std::size_t n = 0;
    for (const auto& req : mock.requests())
        n += req.messages.back().content.find("search query") == std::string::npos;
    return n;
}

// 7. Generate-execute-repair contract.
void solve_contract(Outcome& o) {
    rag::ChallengeTask task;
    task.id = "bell";
    task.description = "Prepare a Bell state on two wires and return the probabilities.";
    task.template_code = "def circuit():\n    pass\n";
    task.tests_code = "def test_main():\n    pass\n";
    rag::PipelineConfig cfg;  // tau 0.60, two repairs

    corpus::InstructionPair ex;
    ex.id = "ex1";
    ex.instruction = "Create a Bell state with Hadamard and CNOT, returning probabilities.";
    ex.code = "def bell():\n    qml.Hadamard(wires=0)\n    qml.CNOT(wires=[0, 1])\n    return qml.probs(wires=[0, 1])\n";
    retrieval::Retrieval low, high;
    low.pairs = {{&ex, 0.55}};
    low.max_score = 0.55;
    high.pairs = {{&ex, 0.60}};
    high.max_score = 0.60;
    auto pa = rag::build_prompt(task, low, cfg);
    o.require(pa.kind == rag::PromptKind::Base && pa.user.find(ex.code) == std::string::npos, "(a) 0.55 did not give the base prompt");
    auto pb = rag::build_prompt(task, high, cfg);
    o.require(pb.kind == rag::PromptKind::Rag &&
                  pb.user.find("If retrieved examples are not relevant to this challenge, ignore them and rely on your own "
                               "PennyLane knowledge.") != std::string::npos,
              "(b) score >= tau did not give the RAG prompt with the selective-context sentence");

    auto wl = analyzer::Whitelist::builtin();
    auto rules = sandbox::ClassifierRules::builtin();
    MarkerExecutor exec;
    auto run = [&](const std::vector<std::string>& replies, std::size_t& calls) {
        auto mock = std::make_shared<llm::ScriptedProvider>();
        mock->add_rule("search query", "bell state hadamard cnot probs");
        for (const auto& r : replies) mock->enqueue("```python\n" + r + "\n```");
        mock->set_fallback("```python\nx = 'still wrong'\n```");
        llm::Gateway gw(mock, no_sleep());
        rag::SolveContext ctx;
        ctx.gateway = &gw;
        ctx.executor = &exec;
        ctx.whitelist = &wl;
        ctx.rules = &rules;
        auto out = rag::solve(task, ctx, cfg);
        calls = generation_calls(*mock);
        return out;
    };
    std::size_t calls = 0;
    auto c = run({"x = 1", "x = 2", "x = 'PASS'"}, calls);
    o.require(calls == 3 && c.attempts.size() == 3 && c.final_pass, "(c) fail-fail-pass made " + std::to_string(calls) +
                                                                       " generation calls, final_pass " + (c.final_pass ? "true" : "false"));
    auto d = run({}, calls);
    o.require(calls == 3 && d.attempts.size() == 3 && !d.final_pass,
              "(d) always-fail made " + std::to_string(d.attempts.size()) + " attempts");
    if (o.ok) o.detail << "(a) base at 0.55, (b) rag at 0.60 with sentence, (c) 3 calls then pass, (d) stop after 3";
}

// 8. pass@k.
void pass_at_k_suite(Outcome& o) {
    std::vector<std::vector<bool>> paper(25, std::vector<bool>(5, false));
    for (int i = 0; i < 14; ++i) paper[i][static_cast<std::size_t>(i % 5)] = true;
    double v = eval::pass_at_k(paper, 5);
    o.require(v == 0.56, "14/25 gave " + fmt(v, 17));
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 1 + rng() % 40;
        std::vector<std::vector<bool>> m(n, std::vector<bool>(5));
        double p = static_cast<double>(rng() % 100) / 100.0;
        for (auto& row : m)
            for (std::size_t j = 0; j < 5; ++j) row[j] = static_cast<double>(rng() % 1000) / 1000.0 < p;
        if (eval::pass_at_k(m, 5) < eval::pass_at_k(m, 1)) {
            o.require(false, "pass@5 < pass@1 on random matrix " + std::to_string(t));
            break;
        }
    }
    if (o.ok) o.detail << "14/25 = 0.56, pass@5 >= pass@1 on 100 random matrices";
}

sandbox::ExecutionResult result_with(sandbox::ExitKind kind, std::vector<sandbox::TestOutcome> tests, std::string stderr_text) {
    sandbox::ExecutionResult r;
    r.exit_kind = kind;
    r.stderr_text = std::move(stderr_text);
    if (kind == sandbox::ExitKind::Timeout) sandbox::finalize(r, std::nullopt);
    else sandbox::finalize(r, std::move(tests));
    return r;
}

// 9. Error classification.
void classification_suite(Outcome& o) {
    using sandbox::ErrorCategory;
    using sandbox::ExitKind;
    const auto wl = analyzer::Whitelist::builtin();
    const std::string clean = "import pennylane as qml\n\ndef c(x):\n    qml.RX(x, wires=0)\n    return qml.expval(qml.PauliZ(0))\n";
    const std::string fake = "import pennylane as qml\n\ndef c(x):\n    qml.QuantumBoost(x, wires=0)\n    return qml.expval(qml.PauliZ(0))\n";

    struct Case {
        ErrorCategory want;
        sandbox::ExecutionResult result;
        std::optional<std::string> code;
    };
    std::vector<Case> cases = {
        {ErrorCategory::FormattingFailure, result_with(ExitKind::Ok, {{"test_main", false, "AssertionError"}}, ""), std::nullopt},
        {ErrorCategory::Hallucination,
         result_with(ExitKind::Ok, {{"test_main", false, "AttributeError: module 'pennylane' has no attribute 'QuantumBoost'"}}, ""),
         fake},
        {ErrorCategory::ReasoningError, result_with(ExitKind::Ok, {{"test_main", false, "AssertionError: 0.5 != 0.25"}}, ""), clean},
        {ErrorCategory::ApiMisuse,
         result_with(ExitKind::Ok, {{"test_main", false, "TypeError: RX.__init__() missing 1 required positional argument"}}, ""),
         clean},
        {ErrorCategory::Timeout, result_with(ExitKind::Timeout, {}, ""), clean},
    };
    std::set<ErrorCategory> seen;
    for (const auto& c : cases) {
        auto got = sandbox::classify_error(c.result, c.code ? std::optional<std::string_view>(*c.code) : std::nullopt, wl);
        o.require(got == c.want, "fixture for " + std::string(sandbox::to_string(c.want)) + " classified as " +
                                     std::string(sandbox::to_string(got)));
        seen.insert(got);
    }
    o.require(seen.size() == 5, "five fixtures did not hit five distinct categories");

    // Randomized results against an independent decision list.
    struct Msg {
        const char* text;
        int label;  // 0 neutral, 1 hallucination, 2 api misuse, 3 reasoning
    };
    const std::vector<Msg> msgs = {
        {"", 0},
        {"RuntimeError: something odd", 0},
        {"AttributeError: module 'pennylane' has no attribute 'Boost'", 1},
        {"AttributeError: module 'pennylane' has no attribute 'templates'", 2},
        {"TypeError: unsupported operand", 2},
        {"pennylane.wires.WireError: Did not find some of the wires", 2},
        {"AssertionError: expected 1", 3},
    };
    std::mt19937_64 rng(11);
    int mismatches = 0;
    for (int t = 0; t < 200; ++t) {
        ExitKind kind = std::array{ExitKind::Ok, ExitKind::NonzeroExit, ExitKind::Timeout}[rng() % 3];
        int code_kind = static_cast<int>(rng() % 3);  // none, clean, fake
        const Msg& m = msgs[rng() % msgs.size()];
        int shape = static_cast<int>(rng() % 4);  // pass, fail, no tests, import syntax error
        std::vector<sandbox::TestOutcome> tests;
        if (shape == 0) tests = {{"test_a", true, ""}};
        else if (shape == 1) tests = {{"test_a", false, m.text}};
        else if (shape == 3) tests = {{"import", false, "SyntaxError: invalid syntax"}};
        bool in_stderr = rng() % 2;
        auto r = result_with(kind, tests, in_stderr ? m.text : "");
        std::optional<std::string> code;
        if (code_kind == 1) code = clean;
        if (code_kind == 2) code = fake;

        ErrorCategory want;
        bool message_seen = shape == 1 || in_stderr;
        if (r.passed) want = ErrorCategory::None;
        else if (kind == ExitKind::Timeout) want = ErrorCategory::Timeout;
        else if (!code || !r.tests_loaded) want = ErrorCategory::FormattingFailure;
        else if (code_kind == 2) want = ErrorCategory::Hallucination;
        else if (message_seen && m.label == 1) want = ErrorCategory::Hallucination;
        else if (message_seen && m.label == 2) want = ErrorCategory::ApiMisuse;
        else want = ErrorCategory::ReasoningError;

        auto got = sandbox::classify_error(r, code ? std::optional<std::string_view>(*code) : std::nullopt, wl);
        int memberships = (got == ErrorCategory::None);
        for (auto cat : sandbox::kFailureCategories) memberships += got == cat;
        bool consistent = r.passed ? got == ErrorCategory::None : got != ErrorCategory::None;
        if (got != want || memberships != 1 || !consistent) ++mismatches;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " of 200 randomized results misclassified");
    if (o.ok) o.detail << "5 fixtures onto 5 categories, 200 randomized results each in exactly one category";
}

// 10. Corpus profile.
void profile_suite(Outcome& o) {
    auto path = fs::temp_directory_path() / ("qsynth-acceptance-profile-" + std::to_string(::getpid()) + ".jsonl");
    std::vector<nlohmann::json> rows;
    for (auto [cat, n] : {std::pair{"official", 1934}, {"community", 8245}, {"archive", 3210}})
        for (int i = 0; i < n; ++i) rows.push_back({{"id", std::string(cat) + std::to_string(i)}, {"category", cat}});
    std::shuffle(rows.begin(), rows.end(), std::mt19937_64(1));
    io::write_jsonl(path, rows);
    auto c = corpus::profile_jsonl(path);
    fs::remove(path);
    const double want[3] = {14.4, 61.6, 24.0};
    for (int i = 0; i < 3; ++i)
        o.require(std::fabs(c.percent[i] - want[i]) <= kProfileTol, "share " + std::to_string(i) + " = " + fmt(c.percent[i], 3));
    o.require(std::fabs(c.percent[0] + c.percent[1] + c.percent[2] - 100.0) <= kProfileTol, "shares do not sum to 100");
    if (o.ok) o.detail << fmt(c.percent[0], 1) << "/" << fmt(c.percent[1], 1) << "/" << fmt(c.percent[2], 1) << " of " << c.total;
}

struct Criterion {
    const char* name;
    std::function<void(Outcome&)> fn;
    double limit_seconds;  // 0: no runtime bound
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"entry32-pipeline-golden", entry32_golden, kGoldenLimit},
        {"dedup-fixture-and-minhash-accuracy", dedup_fixture, kDedupLimit},
        {"dataflow-match-oracle", dataflow_suite, 0},
        {"quantum-codebleu", codebleu_suite, 0},
        {"rouge-l", rouge_suite, 0},
        {"retrieval-consistency", retrieval_suite, kRetrievalLimit},
        {"generate-execute-repair-contract", solve_contract, 0},
        {"pass-at-k", pass_at_k_suite, 0},
        {"error-classification", classification_suite, 0},
        {"profile-composition", profile_suite, 0},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].fn(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].limit_seconds > 0)
            o.require(secs < criteria[i].limit_seconds, "took " + fmt(secs, 2) + " s, limit " + fmt(criteria[i].limit_seconds, 0) + " s");
        failed += !o.ok;
        std::cout << (o.ok ? "PASS" : "FAIL") << "  [" << (i + 1) << "] " << criteria[i].name << "  (" << fmt(secs, 3)
                  << " s)  " << o.detail.str() << "\n";
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << (criteria.size() - failed) << "/" << criteria.size() << "\n";
    return failed ? 1 : 0;
}
