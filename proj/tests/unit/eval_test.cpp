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

#include <cmath>

#include "qsynth/eval/metrics.hpp"
#include "qsynth/util/io.hpp"

namespace qsynth::eval {
namespace {

std::string fixture(const std::string& name) {
    return io::read_file(std::string(QSYNTH_FIXTURE_DIR) + "/metrics/" + name);
}

struct OracleRow {
    const char* pair;
    std::size_t h_tokens, r_tokens;
    double bleu, weighted, rouge;
};

// tests/oracles/metrics_oracle.py
const OracleRow kOracle[] = {
    {"01", 55, 55, 0.904565847117, 0.9345787967, 0.963636363636},
    {"02", 59, 69, 0.763012402292, 0.768859988545, 0.859375},
    {"03", 54, 61, 0.836204648929, 0.841168929554, 0.921739130435},
    {"04", 13, 10, 0.20291306102, 0.20291306102, 0.608695652174},
    {"05", 95, 101, 0.754900016766, 0.808877083174, 0.857142857143},
    {"06", 56, 56, 0.906357087725, 0.830817516102, 0.964285714286},
    {"07", 48, 42, 0.091594865588, 0.091594865588, 0.422222222222},
    {"08", 23, 64, 0.120206716309, 0.177141435248, 0.505747126437},
    {"09", 4, 58, 5.20852e-07, 2.88e-10, 0.064516129032},
    {"10", 46, 50, 0.884267073138, 0.783595951079, 0.958333333333},
};

TEST(Metrics, FixturePairsMatchOracle) {
    for (const auto& row : kOracle) {
        SCOPED_TRACE(row.pair);
        auto h = fixture(std::string("hyp") + row.pair + ".py");
        auto r = fixture(std::string("ref") + row.pair + ".py");
        EXPECT_EQ(metric_tokens(h).size(), row.h_tokens);
        EXPECT_EQ(metric_tokens(r).size(), row.r_tokens);
        EXPECT_NEAR(token_bleu(h, r), row.bleu, 1e-9);
        EXPECT_NEAR(weighted_bleu(h, r), row.weighted, 1e-9);
        EXPECT_NEAR(rouge_l(h, r), row.rouge, 1e-9);
    }
}

TEST(Metrics, IdentityAndDisjoint) {
    auto r = fixture("ref01.py");
    auto m = compute_metrics(r, r);
    EXPECT_NEAR(m.token_bleu, 1.0, 1e-12);
    EXPECT_NEAR(m.weighted_bleu, 1.0, 1e-12);
    EXPECT_NEAR(m.ast_match, 1.0, 1e-12);
    EXPECT_NEAR(m.dataflow_match, 1.0, 1e-12);
    EXPECT_NEAR(m.codebleu, 1.0, 1e-12);
    EXPECT_NEAR(m.rouge_l, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(token_bleu("a b c d", "w x y z"), 0.0);
    EXPECT_DOUBLE_EQ(rouge_l("a b c d", "w x y z"), 0.0);
}

TEST(Metrics, EmptyInputThrows) {
    EXPECT_THROW(token_bleu("", "x = 1"), EmptyInput);
    EXPECT_THROW(rouge_l("x = 1", "# only a comment\n"), EmptyInput);
}

TEST(Metrics, WeightedEqualsTokenBleuWithoutQml) {
    auto h = fixture("hyp04.py");
    auto r = fixture("ref04.py");
    EXPECT_DOUBLE_EQ(weighted_bleu(h, r), token_bleu(h, r));
}

TEST(Metrics, UpweightRepeatsWholeSpan) {
    std::vector<std::string> in = {"x", "=", "qml", ".", "templates", ".", "AngleEmbedding", "(", ")"};
    std::vector<std::string> want = {"x", "="};
    for (int i = 0; i < 3; ++i)
        want.insert(want.end(), {"qml", ".", "templates", ".", "AngleEmbedding"});
    want.insert(want.end(), {"(", ")"});
    EXPECT_EQ(upweight_qml(in), want);
    EXPECT_EQ(upweight_qml({"qml", "."}), (std::vector<std::string>{"qml", "."}));
}

// Equal plain BLEU; the hypothesis that keeps the qml calls scores higher once
// those calls are upweighted.
TEST(Metrics, WeightedBleuFavoursMatchingQmlCalls) {
    auto r = fixture("mono_ref.py");
    auto q = fixture("mono_qml.py");
    auto p = fixture("mono_plain.py");
    EXPECT_NEAR(token_bleu(q, r), token_bleu(p, r), 1e-12);
    EXPECT_NEAR(weighted_bleu(q, r), 0.468058451113, 1e-9);
    EXPECT_NEAR(weighted_bleu(p, r), 0.17544984439, 1e-9);
    EXPECT_GT(weighted_bleu(q, r), weighted_bleu(p, r));
}

// Module, Expr, Call, BinOp in the reference; the extra statement changes
// only the Module signature.
TEST(Metrics, AstMatchHandExample) {
    EXPECT_EQ(syntax_subtrees("f(a + b)\n").size(), 4u);
    EXPECT_NEAR(ast_match("f(a + b)\nz = 0\n", "f(a + b)\n"), 0.75, 1e-12);
    EXPECT_NEAR(ast_match("g(x + y)\n", "f(a + b)\n"), 1.0, 1e-12);
    EXPECT_NEAR(ast_match("g(x - y)\n", "f(a + b)\n"), 0.0, 1e-12);
}

TEST(Metrics, AstMatchEdgeCases) {
    EXPECT_DOUBLE_EQ(ast_match("def (:\n", "f(a)\n"), 0.0);
    EXPECT_THROW(ast_match("f(a)\n", "def (:\n"), SyntaxError);
    EXPECT_DOUBLE_EQ(ast_match("x\n", "\n"), 1.0);
}

const char* kDfRef = R"(import pennylane as qml
dev = qml.device("default.qubit", wires=1)


def circuit(x):
    qml.RX(x, wires=0)
    return qml.expval(qml.PauliZ(0))
)";

const char* kDfHyp = R"(import pennylane as qml
dev = qml.device("default.qubit", wires=1)


def circuit(x):
    qml.RX(x, wires=0)
    return qml.PauliZ(0)
)";

TEST(Metrics, DataflowJaccard) {
    using Keys = std::set<std::string>;
    EXPECT_EQ(dataflow_keys(kDfRef), (Keys{"PauliZ", "RX", "default.qubit", "expval"}));
    EXPECT_EQ(dataflow_keys(kDfHyp), (Keys{"PauliZ", "RX", "default.qubit"}));
    EXPECT_DOUBLE_EQ(dataflow_match(kDfHyp, kDfRef), 0.75);
    EXPECT_DOUBLE_EQ(dataflow_match(kDfRef, kDfHyp), 0.75);
    EXPECT_DOUBLE_EQ(dataflow_match("x = 1\n", "y = 2\n"), 1.0);
    EXPECT_DOUBLE_EQ(dataflow_match("def (:\n", kDfRef), 0.0);
    EXPECT_DOUBLE_EQ(dataflow_match("import pennylane as qml\nqml.CZ(wires=[0, 1])\n", kDfRef), 0.0);
}

TEST(Metrics, RougeLcsExample) {
    EXPECT_EQ(rouge_l(std::vector<std::string>{"a", "c", "e"}, {"a", "b", "c", "d", "e"}), 0.75);
}

TEST(Metrics, CodeBleuIsMeanOfComponents) {
    for (const auto& row : kOracle) {
        auto m = compute_metrics(fixture(std::string("hyp") + row.pair + ".py"),
                                 fixture(std::string("ref") + row.pair + ".py"));
        EXPECT_NEAR(m.codebleu, (m.token_bleu + m.weighted_bleu + m.ast_match + m.dataflow_match) / 4.0, 1e-9);
        for (double v : {m.token_bleu, m.weighted_bleu, m.ast_match, m.dataflow_match, m.codebleu, m.rouge_l}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(PassAtK, CountsChallenges) {
    std::vector<std::vector<bool>> runs(25, std::vector<bool>(5, false));
    for (int i = 0; i < 14; ++i) runs[i][0] = true;
    runs[20][3] = true;
    EXPECT_DOUBLE_EQ(pass_at_k(runs, 1), 0.56);
    EXPECT_DOUBLE_EQ(pass_at_k(runs, 5), 0.60);
    EXPECT_GE(pass_at_k(runs, 5), pass_at_k(runs, 1));
    EXPECT_THROW(pass_at_k(runs, 6), InsufficientAttempts);
}

TEST(PartialCredit, Ratio) {
    sandbox::ExecutionResult r;
    r.tests_total = 4;
    r.tests_passed = 3;
    EXPECT_DOUBLE_EQ(partial_credit(r), 0.75);
    r.tests_total = 0;
    r.tests_passed = 0;
    EXPECT_THROW(partial_credit(r), NoTests);
}

TEST(Hallucination, Rate) {
    const auto& wl = analyzer::Whitelist::builtin();
    std::vector<std::string> sols = {
        "import pennylane as qml\nqml.RX(0.1, wires=0)\n",
        "import pennylane as qml\nqml.QuantumMagicGate(wires=0)\n",
        "x = 1\n",
        "import pennylane as qml\nqml.Hadamard(wires=0)\n",
    };
    auto s = hallucination_rate(sols, wl);
    EXPECT_EQ(s.hallucinated, 1u);
    EXPECT_EQ(s.total, 4u);
    EXPECT_DOUBLE_EQ(s.rate, 0.25);
    EXPECT_EQ(hallucinated_names(sols[1], wl), (std::set<std::string>{"QuantumMagicGate"}));
    auto e = hallucination_rate({}, wl);
    EXPECT_DOUBLE_EQ(e.rate, 0.0);
    EXPECT_FALSE(e.warning.empty());
}

TEST(Hallucination, UnparseableScannedLexically) {
    const auto& wl = analyzer::Whitelist::builtin();
    EXPECT_EQ(hallucinated_names("qml.FakeOp(wires=0\n", wl), (std::set<std::string>{"FakeOp"}));
}

}  // namespace
}  // namespace qsynth::eval
