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

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qsynth/corpus/types.hpp"
#include "qsynth/retrieval/embedding.hpp"

namespace qsynth::retrieval {

struct Hit {
    std::string id;
    double score = 0;
};

struct RetrievalResult {
    std::vector<Hit> hits;  // non-increasing score, ties by ascending id
    std::size_t k = 0;
    double max_score = -std::numeric_limits<double>::infinity();
};

/// Exhaustive-scan cosine index over float32 vectors from one provider.
class VectorIndex {
public:
    VectorIndex(std::string provider_id, std::size_t dim, std::uint64_t seed = 0);

    /// Throws ValidationError on duplicate id, foreign provider, non-finite or
    /// zero vectors, DimensionMismatch on dim.
    void add(const std::string& id, const Embedding& e);

    /// Top-k by cosine. Throws ValidationError if k == 0 or the query comes from
    /// another provider.
    RetrievalResult query(const Embedding& q, std::size_t k) const;

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    std::size_t dim() const { return dim_; }
    const std::string& provider_id() const { return provider_id_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::string>& ids() const { return ids_; }
    std::vector<float> vector(std::size_t i) const;

    /// Writes manifest.json, vectors.f32 (little-endian, row-major) and ids.txt.
    void save(const std::filesystem::path& dir) const;
    static VectorIndex load(const std::filesystem::path& dir);

private:
    std::string provider_id_;
    std::size_t dim_;
    std::uint64_t seed_;
    std::vector<std::string> ids_;
    std::vector<float> data_;
    std::map<std::string, std::size_t> pos_;
};

/// Text embedded for a corpus entry.
std::string pair_text(const corpus::InstructionPair& p);

struct RetrievedPair {
    const corpus::InstructionPair* pair = nullptr;
    double score = 0;
};

struct Retrieval {
    std::vector<RetrievedPair> pairs;
    double max_score = -std::numeric_limits<double>::infinity();
};

/// Corpus entries plus their vector index.
class KnowledgeBase {
public:
    KnowledgeBase(std::vector<corpus::InstructionPair> pairs, VectorIndex index);

    /// Embeds every pair. Throws ValidationError on duplicate ids.
    static KnowledgeBase build(std::vector<corpus::InstructionPair> pairs, const EmbeddingProvider& provider,
                               std::uint64_t seed = 0);

    Retrieval retrieve(const std::string& query, const EmbeddingProvider& provider, std::size_t k) const;

    const VectorIndex& index() const { return index_; }
    const std::vector<corpus::InstructionPair>& pairs() const { return pairs_; }
    const corpus::InstructionPair* find(const std::string& id) const;

    /// Index files plus pairs.jsonl.
    void save(const std::filesystem::path& dir) const;
    static KnowledgeBase load(const std::filesystem::path& dir);

private:
    std::vector<corpus::InstructionPair> pairs_;
    VectorIndex index_;
    std::map<std::string, std::size_t> by_id_;
};

}  // namespace qsynth::retrieval
