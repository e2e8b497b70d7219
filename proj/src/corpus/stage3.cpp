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

#include "qsynth/corpus/stage3.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include "qsynth/python/lexer.hpp"
#include "qsynth/util/error.hpp"
#include "qsynth/util/parallel.hpp"

namespace qsynth::corpus {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mod_mersenne(unsigned __int128 x) {
    std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
    unsigned __int128 hi = x >> 61;
    unsigned __int128 r = lo + hi;
    while (r >= kMersenne61) r = (r & kMersenne61) + (r >> 61);
    std::uint64_t out = static_cast<std::uint64_t>(r);
    return out == kMersenne61 ? 0 : out;
}

std::uint64_t shingle_hash(const Shingle& s) {
    std::uint64_t h = fnv1a(s[0]);
    h = fnv1a("\x1f", h);
    h = fnv1a(s[1], h);
    h = fnv1a("\x1f", h);
    return fnv1a(s[2], h);
}

struct Permutations {
    std::array<std::uint64_t, kNumPermutations> a;
    std::array<std::uint64_t, kNumPermutations> b;

    explicit Permutations(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::uint64_t> da(1, kMersenne61 - 1);
        std::uniform_int_distribution<std::uint64_t> db(0, kMersenne61 - 1);
        for (std::size_t i = 0; i < kNumPermutations; ++i) {
            a[i] = da(rng);
            b[i] = db(rng);
        }
    }
};

std::uint64_t band_key(const MinHashSignature& sig, std::size_t band, std::size_t rows) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ band;
    for (std::size_t r = 0; r < rows; ++r) {
        h ^= sig.minima[band * rows + r] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace

ShingleSet shingle_tokens(const std::vector<std::string>& tokens) {
    ShingleSet s;
    s.token_count = tokens.size();
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) s.shingles.insert({tokens[i], tokens[i + 1], tokens[i + 2]});
    return s;
}

ShingleSet shingle(std::string_view code) { return shingle_tokens(python::lexical_tokens_or_words(code)); }

bool MinHashSignature::is_empty() const { return minima[0] == kEmpty; }

MinHashSignature signature(const ShingleSet& s, std::uint64_t seed) {
    MinHashSignature sig;
    sig.seed = seed;
    sig.minima.fill(kEmpty);
    if (s.shingles.empty()) return sig;
    const Permutations perm(seed);
    for (const auto& sh : s.shingles) {
        std::uint64_t x = mod_mersenne(shingle_hash(sh));
        for (std::size_t i = 0; i < kNumPermutations; ++i) {
            std::uint64_t v = mod_mersenne(static_cast<unsigned __int128>(perm.a[i]) * x + perm.b[i]);
            sig.minima[i] = std::min(sig.minima[i], v);
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.seed != b.seed) throw ValidationError("signatures use different seeds");
    if (a.is_empty() || b.is_empty()) return 0.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < kNumPermutations; ++i) same += a.minima[i] == b.minima[i];
    return static_cast<double>(same) / static_cast<double>(kNumPermutations);
}

double exact_jaccard(const std::set<Shingle>& a, const std::set<Shingle>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++inter;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

DedupResult dedup(const std::vector<DedupItem>& items, const DedupOptions& options) {
    if (options.bands * options.rows != kNumPermutations)
        throw ValidationError("bands * rows must equal " + std::to_string(kNumPermutations));
    if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) throw ValidationError("threshold must be in [0, 1]");

    std::vector<ShingleSet> sets(items.size());
    std::vector<MinHashSignature> sigs(items.size());
    parallel_for(items.size(), options.workers, [&](std::size_t i) {
        sets[i] = shingle(items[i].code);
        sigs[i] = signature(sets[i], options.seed);
    });

    DedupResult result;
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> buckets(options.bands);
    std::unordered_map<std::string, std::size_t> exact_text;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto same = exact_text.find(items[i].code);
        if (same != exact_text.end()) {
            result.duplicates.push_back({items[i].id, items[same->second].id, 1.0});
            continue;
        }
        std::vector<std::size_t> candidates;
        if (!sigs[i].is_empty()) {
            for (std::size_t band = 0; band < options.bands; ++band) {
                auto it = buckets[band].find(band_key(sigs[i], band, options.rows));
                if (it != buckets[band].end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
            }
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        result.candidate_pairs += candidates.size();
        bool removed = false;
        for (std::size_t c : candidates) {
            double j = exact_jaccard(sets[i].shingles, sets[c].shingles);
            if (j >= options.threshold) {
                result.duplicates.push_back({items[i].id, items[c].id, j});
                removed = true;
                break;
            }
        }
        if (removed) continue;
        result.retained.push_back(i);
        exact_text.emplace(items[i].code, i);
        if (!sigs[i].is_empty()) {
            for (std::size_t band = 0; band < options.bands; ++band)
                buckets[band][band_key(sigs[i], band, options.rows)].push_back(i);
        }
    }
    return result;
}

}  // namespace qsynth::corpus
