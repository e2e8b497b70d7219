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

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "qsynth/util/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qsynth {
namespace {

const std::string kCli = QSYNTH_CLI_PATH;
const std::string kFixtures = QSYNTH_FIXTURE_DIR;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        std::string tmpl = (fs::temp_directory_path() / "qsynth-cli-XXXXXX").string();
        ASSERT_NE(mkdtemp(tmpl.data()), nullptr);
        dir_ = tmpl;
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Exit status; stdout and stderr land in out_ and err_.
    int run(const std::string& args) {
        std::string cmd = "cd '" + dir_.string() + "' && '" + kCli + "' " + args + " >stdout.txt 2>stderr.txt";
        int status = std::system(cmd.c_str());
        out_ = io::read_file(dir_ / "stdout.txt");
        err_ = io::read_file(dir_ / "stderr.txt");
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(path(name).parent_path());
        io::write_file_atomic(path(name), content);
    }

    void write_sources() {
        fs::create_directories(path("src"));
        for (auto f : {"quantum_classifier.py", "device_probs.py"}) fs::copy_file(kFixtures + "/" + f, path("src") / f);
    }

    void write_config(const std::string& extra = "") {
        json script = {{"rules",
                        json::array({{{"pattern", "Fix this PennyLane code"}, {"reply", "{{echo_code}}"}},
                                     {{"pattern", "write a clear instruction prompt"},
                                      {"reply",
                                       "Build a variational quantum circuit that embeds input features on every wire, "
                                       "applies entangling layers and returns the Pauli-Z expectation value of the "
                                       "first wire."}},
                                     {{"pattern", "Rewrite the following"}, {"reply", "increment a number"}},
                                     {{"pattern", "Solve the following|did not pass"},
                                      {"reply", "```python\ndef f(x):\n    return x + 1\n```"}}})}};
        write("config/mock.json", script.dump());
        std::string cfg = R"({"workers": 2, "llm": {"provider": "scripted", "providers": {"scripted": {"type": "mock", "script": "mock.json"}}},
            "embedding": {"type": "hashing", "dim": 256}, "executor": {"shim": ")" +
                          kFixtures + R"(/shims/mini_shim.py"})" + extra + "}";
        write("config/qsynth.json", cfg);
    }

    fs::path dir_;
    std::string out_, err_;
};

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_NE(err_.find("Usage"), std::string::npos);
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("profile"), 1);
    EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, ProfileReproducesSourceShares) {
    std::string rows;
    for (auto [cat, n] : {std::pair{"official", 1934}, {"community", 8245}, {"archive", 3210}})
        for (int i = 0; i < n; ++i) rows += json{{"id", std::string(cat) + std::to_string(i)}, {"category", cat}}.dump() + "\n";
    write("corpus.jsonl", rows);
    ASSERT_EQ(run("profile --in corpus.jsonl --out profile.json"), 0) << err_;
    EXPECT_NE(out_.find("official   1934    14.4%"), std::string::npos) << out_;
    EXPECT_NE(out_.find("community  8245    61.6%"), std::string::npos) << out_;
    EXPECT_NE(out_.find("archive    3210    24.0%"), std::string::npos) << out_;
    auto p = json::parse(io::read_file(path("profile.json")));
    EXPECT_EQ(p["total"], 13389);
    double sum = p["official"]["percent"].get<double>() + p["community"]["percent"].get<double>() +
                 p["archive"]["percent"].get<double>();
    EXPECT_NEAR(sum, 100.0, 1e-9);
    auto m = json::parse(io::read_file(path("profile.json.manifest.json")));
    EXPECT_EQ(m["command"], "profile");
    EXPECT_EQ(m["status"], "complete");
}

TEST_F(CliTest, ProfileRejectsUnknownCategory) {
    write("bad.jsonl", R"({"id": "a", "category": "forum"})" "\n");
    EXPECT_EQ(run("profile --in bad.jsonl"), 1);
}

TEST_F(CliTest, DedupKeepsBothEntries) {
    std::string rows;
    for (auto [id, f] : {std::pair{"e32", "entries/entry32_modernized.py"}, {"e265", "entries/entry265.py"},
                         {"copy", "entries/entry265.py"}})
        rows += json{{"id", id}, {"code", io::read_file(kFixtures + "/" + f)}}.dump() + "\n";
    write("verified.jsonl", rows);
    ASSERT_EQ(run("dedup --in verified.jsonl --out deduped.jsonl --threshold 0.70 --duplicates dups.jsonl"), 0) << err_;
    auto kept = io::read_jsonl(path("deduped.jsonl"));
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0]["id"], "e32");
    EXPECT_EQ(kept[1]["id"], "e265");
    auto dups = io::read_jsonl(path("dups.jsonl"));
    ASSERT_EQ(dups.size(), 1u);
    EXPECT_EQ(dups[0]["removed"], "copy");
    EXPECT_EQ(dups[0]["survivor"], "e265");
    EXPECT_EQ(run("dedup --in verified.jsonl --out x.jsonl --threshold 1.5"), 1);
}

TEST_F(CliTest, BadConfigIsValidationError) {
    write("config/qsynth.json", R"({"dedup": {"treshold": 0.5}})");
    EXPECT_EQ(run("profile --in nothing.jsonl"), 1);
    EXPECT_NE(err_.find("dedup.treshold"), std::string::npos);
}

TEST_F(CliTest, MissingInputIsRuntimeFailure) {
    EXPECT_EQ(run("profile --in nothing.jsonl"), 2);
}

TEST_F(CliTest, BuildEqualsStagesAndIsDeterministic) {
    write_sources();
    write_config();
    ASSERT_EQ(run("build --dir src --category official --out-dir b1"), 0) << err_;
    ASSERT_EQ(run("build --dir src --category official --out-dir b2"), 0) << err_;
    for (auto f : {"functions.jsonl", "verified.jsonl", "deduped.jsonl", "pairs.jsonl"})
        EXPECT_EQ(io::read_file(path("b1") / f), io::read_file(path("b2") / f)) << f;

    ASSERT_EQ(run("extract --dir src --category official --out s/functions.jsonl"), 0) << err_;
    ASSERT_EQ(run("verify --in s/functions.jsonl --out s/verified.jsonl"), 0) << err_;
    ASSERT_EQ(run("dedup --in s/verified.jsonl --out s/deduped.jsonl"), 0) << err_;
    ASSERT_EQ(run("instruct --in s/deduped.jsonl --out s/pairs.jsonl"), 0) << err_;
    for (auto f : {"functions.jsonl", "verified.jsonl", "deduped.jsonl", "pairs.jsonl"})
        EXPECT_EQ(io::read_file(path("b1") / f), io::read_file(path("s") / f)) << f;

    auto pairs = io::read_jsonl(path("b1/pairs.jsonl"));
    ASSERT_FALSE(pairs.empty());
    for (const auto& p : pairs) {
        EXPECT_FALSE(p["instruction"].get<std::string>().empty());
        EXPECT_EQ(p["source_category"], "official");
    }
    auto m = json::parse(io::read_file(path("b1/manifest.json")));
    EXPECT_EQ(m["status"], "complete");
    EXPECT_EQ(m["seed"], 20250101);
    EXPECT_EQ(m["stats"]["dedup"]["retained"], pairs.size());
    EXPECT_DOUBLE_EQ(m["stats"]["instruct"]["composition"]["official"]["percent"].get<double>(), 100.0);
}

TEST_F(CliTest, UnpairedEntriesMarkManifestPartial) {
    write_sources();
    write_config();
    write("config/mock.json", R"({"rules": [{"pattern": "Fix this", "reply": "{{echo_code}}"}]})");
    ASSERT_EQ(run("build --dir src --category archive --out-dir b"), 0) << err_;
    auto m = json::parse(io::read_file(path("b/manifest.json")));
    EXPECT_EQ(m["status"], "partial");
    EXPECT_GT(m["stats"]["instruct"]["unpaired"].get<int>(), 0);
    EXPECT_FALSE(m["warnings"].empty());
}

TEST_F(CliTest, IndexRetrieveSolveEval) {
    write_sources();
    write_config();
    ASSERT_EQ(run("build --dir src --out-dir b"), 0) << err_;
    ASSERT_EQ(run("index --in b/pairs.jsonl --out kb --check"), 0) << err_;
    EXPECT_NE(out_.find("hashing-256"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("kb/vectors.f32")));
    ASSERT_EQ(run("retrieve --kb kb --k 1 'entangling layers expectation value'"), 0) << err_;
    auto hits = io::parse_jsonl(out_);
    ASSERT_EQ(hits.size(), 1u);

    std::string challenges = kFixtures + "/challenges";
    ASSERT_EQ(run("solve --challenges " + challenges + " --kb kb --out traces.jsonl --runs 2 --tau 0"), 0) << err_;
    auto rows = io::read_jsonl(path("traces.jsonl"));
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_EQ(r["prompt_kind"], "rag");
        if (r["challenge_id"] == "toy_inc") EXPECT_TRUE(r["final_pass"].get<bool>());
        else EXPECT_EQ(r["attempts"].size(), 3u);
    }

    ASSERT_EQ(run("eval --traces traces.jsonl --challenges " + challenges + " --out report.json --pass-k 2"), 0) << err_;
    EXPECT_NE(out_.find("CB     RL     AST    DF"), std::string::npos) << out_;
    auto rep = json::parse(io::read_file(path("report.json")));
    EXPECT_DOUBLE_EQ(rep["aggregate"]["pass_at_1"].get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(rep["aggregate"]["pass_at_k"].get<double>(), 0.5);
    EXPECT_EQ(rep["aggregate"]["k"], 2);
    EXPECT_DOUBLE_EQ(rep["challenges"][0]["metrics"]["codebleu"].get<double>(), 1.0);
}

TEST_F(CliTest, SolveWithoutRetrievalUsesBasePrompt) {
    write_config();
    ASSERT_EQ(run("solve --challenges " + kFixtures + "/challenges --no-retrieval --out t.jsonl"), 0) << err_;
    for (const auto& r : io::read_jsonl(path("t.jsonl"))) EXPECT_EQ(r["prompt_kind"], "base");
    EXPECT_EQ(run("solve --challenges " + kFixtures + "/challenges --out t2.jsonl"), 1);
}

TEST_F(CliTest, ExecutorLaunchFailureExitsTwo) {
    write_config();
    EXPECT_EQ(run("solve --challenges " + kFixtures + "/challenges --no-retrieval --shim /nonexistent/shim.py --out t.jsonl"), 2);
    auto m = json::parse(io::read_file(path("t.jsonl.manifest.json")));
    EXPECT_EQ(m["status"], "failed");
}

}  // namespace
}  // namespace qsynth
