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

#include "qsynth/retrieval/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "qsynth/util/http.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::retrieval {

std::vector<Embedding> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
double cosine_impl(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
    }
    if (na == 0 || nb == 0) throw ZeroVector("cosine of a zero vector");
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace

HashingEmbeddingProvider::HashingEmbeddingProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim == 0) throw ValidationError("embedding dimension must be positive");
}

std::string HashingEmbeddingProvider::id() const {
    return "hashing-" + std::to_string(dim_) + (seed_ ? "-s" + std::to_string(seed_) : "");
}

Embedding HashingEmbeddingProvider::embed(std::string_view t) const {
    auto toks = text::words(t);
    if (toks.empty()) throw ValidationError("cannot embed text without tokens");
    Embedding e{std::vector<double>(dim_, 0.0), id()};
    for (const auto& tok : toks) {
        std::uint64_t h = splitmix64(fnv1a(text::to_lower(tok)) ^ splitmix64(seed_));
        e.values[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
    double norm = 0;
    for (double v : e.values) norm += v * v;
    if (norm == 0) {
        // every token cancelled out in one bucket
        e.values[splitmix64(seed_) % dim_] = 1.0;
        return e;
    }
    norm = std::sqrt(norm);
    for (double& v : e.values) v /= norm;
    return e;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ValidationError("embedding provider needs a base_url");
    if (config_.batch_size == 0) config_.batch_size = 1;
}

Embedding HttpEmbeddingProvider::embed(std::string_view t) const {
    return embed_batch({std::string(t)}).front();
}

std::vector<std::vector<double>> HttpEmbeddingProvider::parse_response(const std::string& body, std::size_t expected) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("embedding response is not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("data") || !j["data"].is_array())
        throw ProviderError("embedding response has no data array");
    const auto& data = j["data"];
    if (data.size() != expected)
        throw ProviderError("expected " + std::to_string(expected) + " embeddings, got " + std::to_string(data.size()));
    std::vector<std::vector<double>> out(expected);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& d = data[i];
        std::size_t slot = d.contains("index") && d["index"].is_number_unsigned() ? d["index"].get<std::size_t>() : i;
        if (slot >= expected || !d.contains("embedding") || !d["embedding"].is_array())
            throw ProviderError("malformed embedding entry " + std::to_string(i));
        for (const auto& v : d["embedding"]) {
            if (!v.is_number()) throw ProviderError("non-numeric embedding value");
            double x = v.get<double>();
            if (!std::isfinite(x)) throw ProviderError("non-finite embedding value");
            out[slot].push_back(x);
        }
    }
    return out;
}

std::vector<Embedding> HttpEmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
    for (const auto& t : texts)
        if (text::trim(t).empty()) throw ValidationError("cannot embed empty text");
    std::map<std::string, std::string> headers = config_.headers;
    if (!config_.api_key_env.empty()) {
        const char* v = std::getenv(config_.api_key_env.c_str());
        if (!v || !*v) throw ProviderError("environment variable " + config_.api_key_env + " is not set");
        headers["Authorization"] = std::string("Bearer ") + v;
    }
    std::string url = config_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    url += "/embeddings";

    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
        std::size_t end = std::min(texts.size(), start + config_.batch_size);
        nlohmann::json body = {{"model", config_.model},
                               {"input", std::vector<std::string>(texts.begin() + start, texts.begin() + end)}};
        auto res = http::post_json(url, headers, body.dump(), config_.timeout_seconds);
        if (res.status == 0) throw ProviderError("embedding request failed: " + res.error);
        if (res.status != 200)
            throw ProviderError("embedding request returned HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200));
        for (auto& v : parse_response(res.body, end - start)) {
            if (config_.dim && v.size() != config_.dim)
                throw DimensionMismatch("provider " + config_.id + " declared dim " + std::to_string(config_.dim) +
                                        " but returned " + std::to_string(v.size()));
            out.push_back({std::move(v), config_.id});
        }
    }
    return out;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) { return cosine_impl(a, b); }
double cosine(const std::vector<float>& a, const std::vector<float>& b) { return cosine_impl(a, b); }

}  // namespace qsynth::retrieval
