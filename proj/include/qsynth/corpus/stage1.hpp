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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/corpus/types.hpp"
#include "qsynth/util/error.hpp"

namespace qsynth::corpus {

/// A source file that does not parse. The file is skipped by batch runs.
class ParseFailure : public Error {
public:
    ParseFailure(std::string record_id, const SyntaxError& cause)
        : Error(record_id + ": " + cause.what()), record_id_(std::move(record_id)) {}
    const std::string& record_id() const noexcept { return record_id_; }

private:
    std::string record_id_;
};

/// Name of the synthetic function wrapping module-level quantum code.
inline constexpr const char* kModuleBodyName = "__module_body__";

struct ExtractionStats {
    std::size_t files = 0;
    std::size_t parse_failures = 0;
    std::size_t enumerated = 0;
    std::size_t retained = 0;
    std::size_t direct = 0;
    std::size_t contextual = 0;

    ExtractionStats& operator+=(const ExtractionStats& o);
    nlohmann::json to_json() const;
};

struct ExtractionResult {
    /// Every enumerated function, rejected ones included, in source order.
    std::vector<ExtractedFunction> functions;
    ExtractionStats stats;

    std::vector<ExtractedFunction> retained() const;
};

/// Enumerates every function definition in the record (nested functions and
/// methods included) and classifies it:
///   direct      the function contains a call into the qml namespace
///   contextual  no such call, but a decorator path ends in `qnode` or the body
///               references a module-level device variable declared earlier
///   rejected    otherwise
/// Retained functions carry the minimal set of file-level imports whose bound
/// names they use. Module-level statements containing qml calls are wrapped
/// into a synthetic `__module_body__` function.
///
/// Throws ParseFailure when the file does not parse and ValidationError when
/// raw_text is empty.
ExtractionResult extract(const SourceRecord& record);

/// Runs extract() over all records on `workers` threads. Unparseable files are
/// counted in stats.parse_failures and reported through `on_failure`.
ExtractionResult extract_all(const std::vector<SourceRecord>& records, unsigned workers,
                             const std::function<void(const ParseFailure&)>& on_failure = {});

/// Manifest lines are either JSON objects {"id","category","url","path"} or
/// tab-separated `id<TAB>category<TAB>url<TAB>path`. Relative paths resolve
/// against the manifest's directory.
std::vector<SourceRecord> load_manifest(const std::filesystem::path& manifest);

/// Every *.py file below `dir`, ids are the paths relative to `dir`.
std::vector<SourceRecord> scan_directory(const std::filesystem::path& dir, SourceCategory category);

}  // namespace qsynth::corpus
