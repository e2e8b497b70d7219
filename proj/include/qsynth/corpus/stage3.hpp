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

#include <array>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qsynth::corpus {

using Shingle = std::array<std::string, 3>;

struct ShingleSet {
    std::set<Shingle> shingles;
    std::size_t token_count = 0;
};

/// Consecutive 3-token windows over the lexical token stream (comments
/// dropped, string literals verbatim). Text that does not tokenize falls back
/// to whitespace splitting.
ShingleSet shingle(std::string_view code);
ShingleSet shingle_tokens(const std::vector<std::string>& tokens);

inline constexpr std::size_t kNumPermutations = 128;
inline constexpr std::uint64_t kDefaultSeed = 20250101;

struct MinHashSignature {
    std::array<std::uint64_t, kNumPermutations> minima{};
    std::uint64_t seed = 0;

    /// True for the signature of an empty shingle set.
    bool is_empty() const;
};

/// 128 minima of (a_i * h(s) + b_i) mod (2^61 - 1) over the shingles, with
/// (a_i, b_i) drawn from a generator seeded by `seed`. The empty set yields an
/// all-ones sentinel.
MinHashSignature signature(const ShingleSet& s, std::uint64_t seed = kDefaultSeed);

/// Fraction of agreeing minima. 0 if either side is the empty sentinel.
/// Throws ValidationError when the seeds differ.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// |A ∩ B| / |A ∪ B|, 0 when both are empty.
double exact_jaccard(const std::set<Shingle>& a, const std::set<Shingle>& b);

struct DedupItem {
    std::string id;
    std::string code;
};

struct DuplicateRecord {
    std::string removed_id;
    std::string survivor_id;
    double jaccard = 0;
};

struct DedupOptions {
    double threshold = 0.70;
    std::uint64_t seed = kDefaultSeed;
    std::size_t bands = 32;
    std::size_t rows = 4;
    unsigned workers = 1;
};

struct DedupResult {
    std::vector<std::size_t> retained;  // indices into the input, ascending
    std::vector<DuplicateRecord> duplicates;
    std::size_t candidate_pairs = 0;
};

/// Near-duplicate removal. Entries are visited in input order; each is
/// compared with the retained entries sharing at least one LSH band bucket and
/// removed if the exact shingle Jaccard with one of them reaches the
/// threshold (the earliest such entry is its survivor). Byte-identical code is
/// always a duplicate.
DedupResult dedup(const std::vector<DedupItem>& items, const DedupOptions& options = {});

}  // namespace qsynth::corpus
