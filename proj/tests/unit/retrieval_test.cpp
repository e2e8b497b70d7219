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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "qsynth/retrieval/embedding.hpp"
#include "qsynth/retrieval/index.hpp"

namespace qsynth::retrieval {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("qsynth_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

TEST(Cosine, HandValues) {
    EXPECT_NEAR(cosine(std::vector<double>{1, 1, 0}, std::vector<double>{1, 0, 0}), 0.70711, 1e-5);
    EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(cosine(std::vector<double>{3, 4}, std::vector<double>{3, 4}), 1.0);
    EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 2}, std::vector<double>{-1, -2}), -1.0);
}

TEST(Cosine, Errors) {
    EXPECT_THROW(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}), DimensionMismatch);
    EXPECT_THROW(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}), ZeroVector);
}

TEST(Cosine, ScaleInvariantAndSymmetric) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> a(16), b(16);
        for (auto& x : a) x = d(rng);
        for (auto& x : b) x = d(rng);
        auto a3 = a;
        for (auto& x : a3) x *= 3.5;
        EXPECT_NEAR(cosine(a, b), cosine(a3, b), 1e-12);
        EXPECT_NEAR(cosine(a, b), cosine(b, a), 1e-15);
    }
}

TEST(HashingProvider, DeterministicAndNormalized) {
    HashingEmbeddingProvider p;
    auto a = p.embed("Implement a circuit with qml.RX on 2 wires");
    auto b = p.embed("Implement a circuit with qml.RX on 2 wires");
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.dim(), 768u);
    double n = 0;
    for (double v : a.values) n += v * v;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-9);
    EXPECT_EQ(a.provider_id, "hashing-768");
}

TEST(HashingProvider, CaseInsensitiveTokens) {
    HashingEmbeddingProvider p;
    EXPECT_EQ(p.embed("Measure PauliZ").values, p.embed("measure pauliz!").values);
}

TEST(HashingProvider, DisjointTokensNearOrthogonal) {
    HashingEmbeddingProvider p;
    // token multisets share nothing, so only bucket collisions contribute
    EXPECT_NEAR(cosine(p.embed("alpha beta gamma").values, p.embed("delta epsilon zeta").values), 0.0, 1e-9);
}

TEST(HashingProvider, RejectsEmpty) {
    HashingEmbeddingProvider p;
    EXPECT_THROW(p.embed(""), ValidationError);
    EXPECT_THROW(p.embed("  ... "), ValidationError);
    EXPECT_THROW(HashingEmbeddingProvider(0), ValidationError);
}

TEST(HashingProvider, SeedChangesVectors) {
    HashingEmbeddingProvider a(768, 0), b(768, 9);
    EXPECT_NE(a.embed("rotation gate").values, b.embed("rotation gate").values);
    EXPECT_NE(a.id(), b.id());
}

Embedding vec(std::vector<double> v, std::string provider = "t") { return {std::move(v), std::move(provider)}; }

TEST(VectorIndex, TruncatesAndOrders) {
    VectorIndex idx("t", 2);
    idx.add("a", vec({1, 0}));
    idx.add("b", vec({1, 1}));
    idx.add("c", vec({0, 1}));
    auto r = idx.query(vec({1, 0.1}), 5);
    ASSERT_EQ(r.hits.size(), 3u);
    EXPECT_EQ(r.hits[0].id, "a");
    EXPECT_EQ(r.hits[1].id, "b");
    EXPECT_EQ(r.hits[2].id, "c");
    EXPECT_DOUBLE_EQ(r.max_score, r.hits[0].score);
    EXPECT_EQ(r.k, 5u);
}

TEST(VectorIndex, TiesByAscendingId) {
    VectorIndex idx("t", 2);
    idx.add("z", vec({1, 0}));
    idx.add("m", vec({2, 0}));
    idx.add("a", vec({0, 1}));
    auto r = idx.query(vec({1, 0}), 2);
    EXPECT_EQ(r.hits[0].id, "m");
    EXPECT_EQ(r.hits[1].id, "z");
}

TEST(VectorIndex, EmptyIndex) {
    VectorIndex idx("t", 3);
    auto r = idx.query(vec({1, 0, 0}), 5);
    EXPECT_TRUE(r.hits.empty());
    EXPECT_TRUE(std::isinf(r.max_score) && r.max_score < 0);
}

TEST(VectorIndex, Validation) {
    VectorIndex idx("t", 2);
    idx.add("a", vec({1, 0}));
    EXPECT_THROW(idx.add("a", vec({0, 1})), ValidationError);
    EXPECT_THROW(idx.add("b", vec({0, 1}, "other")), ValidationError);
    EXPECT_THROW(idx.add("b", vec({0, 1, 0})), DimensionMismatch);
    EXPECT_THROW(idx.add("b", vec({0, 0})), ZeroVector);
    EXPECT_THROW(idx.add("b", vec({NAN, 1})), ValidationError);
    EXPECT_THROW(idx.query(vec({1, 0}), 0), ValidationError);
    EXPECT_THROW(idx.query(vec({1, 0}, "other"), 1), ValidationError);
}

std::vector<corpus::InstructionPair> synthetic_pairs(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> ops = {"RX", "RY", "RZ", "CNOT", "Hadamard", "PauliX", "CZ", "Toffoli",
                                                 "QFT", "AngleEmbedding", "StronglyEntanglingLayers", "probs",
                                                 "expval", "sample", "state", "IsingXX"};
    std::mt19937_64 rng(seed);
    std::vector<corpus::InstructionPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        corpus::InstructionPair p;
        p.id = "pair" + std::to_string(1000 + i);
        std::string a = ops[rng() % ops.size()], b = ops[rng() % ops.size()];
        std::size_t wires = 1 + rng() % 9;
        p.instruction = "Implement circuit " + std::to_string(i) + " tag" + std::to_string(rng() % 100000) + " applying " +
                        a + " then " + b + " on " + std::to_string(wires) + " wires";
        p.code = "def c" + std::to_string(i) + "(x):\n    qml." + a + "(x, wires=0)\n    qml." + b +
                 "(wires=1)\n    return qml.expval(qml.PauliZ(0))\n";
        out.push_back(p);
    }
    return out;
}

TEST(KnowledgeBase, OwnInstructionRanksFirstOnTenPairs) {
    HashingEmbeddingProvider p;
    auto pairs = synthetic_pairs(10, 1);
    auto kb = KnowledgeBase::build(pairs, p);
    for (const auto& pair : pairs) {
        auto r = kb.retrieve(pair.instruction, p, 5);
        ASSERT_FALSE(r.pairs.empty());
        // exhaustive reference over double-precision vectors
        std::string best;
        double best_score = -2;
        auto q = p.embed(pair.instruction);
        for (const auto& other : pairs) {
            double s = cosine(q.values, p.embed(pair_text(other)).values);
            if (s > best_score + 1e-9 || (std::fabs(s - best_score) <= 1e-9 && other.id < best)) {
                best_score = s;
                best = other.id;
            }
        }
        EXPECT_EQ(best, pair.id);
        EXPECT_EQ(r.pairs[0].pair->id, pair.id);
    }
}

TEST(KnowledgeBase, ExhaustiveScanMatchesPairwiseCosineOnThousandPairs) {
    HashingEmbeddingProvider p;
    auto pairs = synthetic_pairs(1000, 2);
    auto kb = KnowledgeBase::build(pairs, p);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto& probe = pairs[rng() % pairs.size()];
        auto q = p.embed(probe.instruction);
        std::vector<float> qf(q.values.begin(), q.values.end());
        std::vector<std::pair<double, std::string>> ref;
        for (std::size_t i = 0; i < kb.index().size(); ++i)
            ref.push_back({-cosine(qf, kb.index().vector(i)), kb.index().ids()[i]});
        std::sort(ref.begin(), ref.end());
        auto r = kb.index().query(q, 5);
        ASSERT_EQ(r.hits.size(), 5u);
        for (std::size_t i = 0; i < 5; ++i) {
            EXPECT_EQ(r.hits[i].id, ref[i].second);
            EXPECT_EQ(r.hits[i].score, -ref[i].first);
        }
    }
}

TEST(KnowledgeBase, SaveLoadRoundTrip) {
    HashingEmbeddingProvider p;
    auto pairs = synthetic_pairs(25, 3);
    auto kb = KnowledgeBase::build(pairs, p, 42);
    auto dir = temp_dir("kb");
    kb.save(dir);
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_EQ(fs::file_size(dir / "vectors.f32"), 25u * 768u * 4u);
    auto loaded = KnowledgeBase::load(dir);
    EXPECT_EQ(loaded.index().seed(), 42u);
    EXPECT_EQ(loaded.index().provider_id(), "hashing-768");
    for (const auto& pair : pairs) {
        auto a = kb.retrieve(pair.instruction, p, 5);
        auto b = loaded.retrieve(pair.instruction, p, 5);
        ASSERT_EQ(a.pairs.size(), b.pairs.size());
        for (std::size_t i = 0; i < a.pairs.size(); ++i) {
            EXPECT_EQ(a.pairs[i].pair->id, b.pairs[i].pair->id);
            EXPECT_EQ(a.pairs[i].score, b.pairs[i].score);
        }
        EXPECT_EQ(b.pairs[0].pair->code, kb.find(b.pairs[0].pair->id)->code);
    }
    fs::remove_all(dir);
}

TEST(KnowledgeBase, LoadRejectsTruncatedVectors) {
    HashingEmbeddingProvider p;
    auto kb = KnowledgeBase::build(synthetic_pairs(3, 4), p);
    auto dir = temp_dir("kb_trunc");
    kb.save(dir);
    fs::resize_file(dir / "vectors.f32", 100);
    EXPECT_THROW(KnowledgeBase::load(dir), ValidationError);
    fs::remove_all(dir);
}

TEST(KnowledgeBase, EmptyCorpusRetrievesNothing) {
    HashingEmbeddingProvider p;
    auto kb = KnowledgeBase::build({}, p);
    auto r = kb.retrieve("anything", p, 5);
    EXPECT_TRUE(r.pairs.empty());
    EXPECT_TRUE(std::isinf(r.max_score));
}

TEST(KnowledgeBase, ForeignProviderQueryRejected) {
    HashingEmbeddingProvider p, q(768, 3);
    auto kb = KnowledgeBase::build(synthetic_pairs(3, 5), p);
    EXPECT_THROW(kb.retrieve("rotation", q, 5), ValidationError);
}

class HttpEmbeddingTest : public ::testing::Test {
protected:
    void SetUp() override {
        server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
            last_body_ = nlohmann::json::parse(req.body);
            if (status_ != 200) {
                res.status = status_;
                return;
            }
            nlohmann::json data = nlohmann::json::array();
            int i = 0;
            for (const auto& t : last_body_["input"]) {
                double len = static_cast<double>(t.get<std::string>().size());
                data.push_back({{"index", i++}, {"embedding", {len, 1.0, 0.0}}});
            }
            res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        thread_.join();
    }
    HttpEmbeddingConfig config() const {
        HttpEmbeddingConfig c;
        c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
        c.model = "embed-test";
        c.dim = 3;
        c.batch_size = 2;
        c.timeout_seconds = 5;
        return c;
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    int status_ = 200;
    nlohmann::json last_body_;
};

TEST_F(HttpEmbeddingTest, BatchesRequests) {
    HttpEmbeddingProvider p(config());
    auto out = p.embed_batch({"a", "bb", "ccc"});
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[2].values, (std::vector<double>{3, 1, 0}));
    EXPECT_EQ(out[0].provider_id, "http-embed");
    EXPECT_EQ(last_body_["model"], "embed-test");
    EXPECT_EQ(last_body_["input"].size(), 1u);
}

TEST_F(HttpEmbeddingTest, DimensionChecked) {
    auto c = config();
    c.dim = 4;
    HttpEmbeddingProvider p(c);
    EXPECT_THROW(p.embed("x"), DimensionMismatch);
}

TEST_F(HttpEmbeddingTest, HttpErrorIsProviderError) {
    status_ = 500;
    HttpEmbeddingProvider p(config());
    EXPECT_THROW(p.embed("x"), ProviderError);
}

TEST(HttpEmbedding, UnreachableIsProviderError) {
    HttpEmbeddingConfig c;
    c.base_url = "http://127.0.0.1:1";
    c.timeout_seconds = 2;
    HttpEmbeddingProvider p(c);
    EXPECT_THROW(p.embed("x"), ProviderError);
}

TEST(HttpEmbedding, ParseResponseShapes) {
    EXPECT_THROW(HttpEmbeddingProvider::parse_response("nope", 1), ProviderError);
    EXPECT_THROW(HttpEmbeddingProvider::parse_response(R"({"data":[]})", 1), ProviderError);
    auto v = HttpEmbeddingProvider::parse_response(R"({"data":[{"index":1,"embedding":[2]},{"index":0,"embedding":[1]}]})", 2);
    EXPECT_EQ(v[0], std::vector<double>{1});
    EXPECT_EQ(v[1], std::vector<double>{2});
}

}  // namespace
}  // namespace qsynth::retrieval
