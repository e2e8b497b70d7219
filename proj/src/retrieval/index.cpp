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

#include "qsynth/retrieval/index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::retrieval {

namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) | (v >> 24);
    }
    return v;
}

}  // namespace

VectorIndex::VectorIndex(std::string provider_id, std::size_t dim, std::uint64_t seed)
    : provider_id_(std::move(provider_id)), dim_(dim), seed_(seed) {
    if (dim_ == 0) throw ValidationError("index dimension must be positive");
}

void VectorIndex::add(const std::string& id, const Embedding& e) {
    if (id.empty() || id.find('\n') != std::string::npos) throw ValidationError("invalid index id '" + id + "'");
    if (e.provider_id != provider_id_)
        throw ValidationError("vector from provider " + e.provider_id + " added to index of " + provider_id_);
    if (e.dim() != dim_)
        throw DimensionMismatch("vector dim " + std::to_string(e.dim()) + " vs index dim " + std::to_string(dim_));
    if (pos_.count(id)) throw ValidationError("duplicate index id " + id);
    double norm = 0;
    for (double v : e.values) {
        if (!std::isfinite(v)) throw ValidationError("non-finite value in vector " + id);
        norm += v * v;
    }
    if (norm == 0) throw ZeroVector("zero vector for " + id);
    pos_[id] = ids_.size();
    ids_.push_back(id);
    for (double v : e.values) data_.push_back(static_cast<float>(v));
}

std::vector<float> VectorIndex::vector(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * dim_), data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_)};
}

RetrievalResult VectorIndex::query(const Embedding& q, std::size_t k) const {
    if (k == 0) throw ValidationError("k must be positive");
    if (q.provider_id != provider_id_)
        throw ValidationError("query from provider " + q.provider_id + " against index of " + provider_id_);
    RetrievalResult r;
    r.k = k;
    if (ids_.empty()) return r;
    std::vector<float> qf(q.values.begin(), q.values.end());
    std::vector<Hit> all;
    all.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) all.push_back({ids_[i], cosine(qf, vector(i))});
    auto better = [](const Hit& a, const Hit& b) { return a.score != b.score ? a.score > b.score : a.id < b.id; };
    std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), better);
    all.resize(n);
    r.hits = std::move(all);
    r.max_score = r.hits.front().score;
    return r;
}

void VectorIndex::save(const fs::path& dir) const {
    fs::create_directories(dir);
    std::string bytes(data_.size() * 4, '\0');
    for (std::size_t i = 0; i < data_.size(); ++i) {
        std::uint32_t u = to_le(std::bit_cast<std::uint32_t>(data_[i]));
        std::memcpy(bytes.data() + i * 4, &u, 4);
    }
    io::write_file_atomic(dir / "vectors.f32", bytes);
    std::string ids;
    for (const auto& id : ids_) ids += id + "\n";
    io::write_file_atomic(dir / "ids.txt", ids);
    nlohmann::json m = {{"format_version", kFormatVersion}, {"provider_id", provider_id_}, {"dim", dim_},
                        {"count", ids_.size()},            {"seed", seed_},               {"dtype", "float32-le"}};
    io::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

VectorIndex VectorIndex::load(const fs::path& dir) {
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(io::read_file(dir / "manifest.json"));
        if (m.at("format_version").get<int>() != kFormatVersion) throw ValidationError("unsupported index format version");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad index manifest in " + dir.string() + ": " + e.what());
    }
    VectorIndex idx(m.at("provider_id").get<std::string>(), m.at("dim").get<std::size_t>(), m.value("seed", std::uint64_t{0}));
    auto count = m.at("count").get<std::size_t>();
    auto lines = text::split_lines(io::read_file(dir / "ids.txt"));
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string bytes = io::read_file(dir / "vectors.f32");
    if (lines.size() != count || bytes.size() != count * idx.dim_ * 4)
        throw ValidationError("index files in " + dir.string() + " disagree with the manifest");
    idx.data_.resize(count * idx.dim_);
    for (std::size_t i = 0; i < idx.data_.size(); ++i) {
        std::uint32_t u;
        std::memcpy(&u, bytes.data() + i * 4, 4);
        idx.data_[i] = std::bit_cast<float>(to_le(u));
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!idx.pos_.emplace(lines[i], i).second) throw ValidationError("duplicate id in index: " + lines[i]);
        idx.ids_.push_back(lines[i]);
    }
    return idx;
}

std::string pair_text(const corpus::InstructionPair& p) { return p.instruction + "\n" + p.code; }

KnowledgeBase::KnowledgeBase(std::vector<corpus::InstructionPair> pairs, VectorIndex index)
    : pairs_(std::move(pairs)), index_(std::move(index)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i)
        if (!by_id_.emplace(pairs_[i].id, i).second) throw ValidationError("duplicate pair id " + pairs_[i].id);
    for (const auto& id : index_.ids())
        if (!by_id_.count(id)) throw ValidationError("index id " + id + " has no corpus entry");
}

KnowledgeBase KnowledgeBase::build(std::vector<corpus::InstructionPair> pairs, const EmbeddingProvider& provider,
                                   std::uint64_t seed) {
    VectorIndex index(provider.id(), provider.dim(), seed);
    std::vector<std::string> texts;
    texts.reserve(pairs.size());
    for (const auto& p : pairs) texts.push_back(pair_text(p));
    auto vecs = provider.embed_batch(texts);
    for (std::size_t i = 0; i < pairs.size(); ++i) index.add(pairs[i].id, vecs[i]);
    return KnowledgeBase(std::move(pairs), std::move(index));
}

const corpus::InstructionPair* KnowledgeBase::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &pairs_[it->second];
}

Retrieval KnowledgeBase::retrieve(const std::string& query, const EmbeddingProvider& provider, std::size_t k) const {
    Retrieval out;
    if (index_.empty()) return out;
    auto r = index_.query(provider.embed(query), k);
    out.max_score = r.max_score;
    for (const auto& h : r.hits) out.pairs.push_back({find(h.id), h.score});
    return out;
}

void KnowledgeBase::save(const fs::path& dir) const {
    index_.save(dir);
    std::vector<nlohmann::json> rows(pairs_.begin(), pairs_.end());
    io::write_jsonl(dir / "pairs.jsonl", rows);
}

KnowledgeBase KnowledgeBase::load(const fs::path& dir) {
    auto index = VectorIndex::load(dir);
    std::vector<corpus::InstructionPair> pairs;
    for (const auto& row : io::read_jsonl(dir / "pairs.jsonl")) pairs.push_back(row.get<corpus::InstructionPair>());
    return KnowledgeBase(std::move(pairs), std::move(index));
}

}  // namespace qsynth::retrieval
