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
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qsynth/util/error.hpp"

namespace qsynth::retrieval {

/// Embedding backend failure (network, bad response).
class ProviderError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ZeroVector : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct Embedding {
    std::vector<double> values;
    std::string provider_id;

    std::size_t dim() const { return values.size(); }
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::size_t dim() const = 0;
    /// Throws ValidationError on empty text, ProviderError on backend failure.
    virtual Embedding embed(std::string_view text) const = 0;
    virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const;
};

/// Deterministic offline provider: signed feature hashing of lowercase
/// alphanumeric tokens into `dim` buckets, L2-normalized.
class HashingEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HashingEmbeddingProvider(std::size_t dim = 768, std::uint64_t seed = 0);

    std::string id() const override;
    std::size_t dim() const override { return dim_; }
    std::uint64_t seed() const { return seed_; }
    Embedding embed(std::string_view text) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

struct HttpEmbeddingConfig {
    std::string id = "http-embed";
    /// Requests go to `<base_url>/embeddings`.
    std::string base_url;
    std::string model;
    std::string api_key_env;
    std::size_t dim = 0;
    std::map<std::string, std::string> headers;
    int timeout_seconds = 60;
    std::size_t batch_size = 32;
};

/// OpenAI-compatible embeddings client: {model, input:[...]} -> data[].embedding.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config);

    std::string id() const override { return config_.id; }
    std::size_t dim() const override { return config_.dim; }
    Embedding embed(std::string_view text) const override;
    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override;

    /// Vectors of an embeddings response in input order. Throws ProviderError.
    static std::vector<std::vector<double>> parse_response(const std::string& body, std::size_t expected);

private:
    HttpEmbeddingConfig config_;
};

/// (a.b) / (|a| |b|). Throws DimensionMismatch or ZeroVector.
double cosine(const std::vector<double>& a, const std::vector<double>& b);
double cosine(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace qsynth::retrieval
