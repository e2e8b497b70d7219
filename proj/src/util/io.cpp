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

#include "qsynth/util/io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "qsynth/util/error.hpp"

namespace qsynth::detail {
const std::map<std::string, std::string_view>& embedded_resources();
}

namespace qsynth::io {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename into " + path.string() + ": " + ec.message());
    }
}

std::vector<nlohmann::json> parse_jsonl(std::string_view text) {
    std::vector<nlohmann::json> rows;
    std::size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        ++line_no;
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            rows.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
    }
    return rows;
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
    try {
        return parse_jsonl(read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string to_jsonl(const std::vector<nlohmann::json>& rows) {
    std::string out;
    for (const auto& row : rows) {
        out += row.dump();
        out.push_back('\n');
    }
    return out;
}

void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& rows) {
    write_file_atomic(path, to_jsonl(rows));
}

std::string_view embedded_resource(std::string_view name) {
    const auto& table = detail::embedded_resources();
    auto it = table.find(std::string(name));
    if (it == table.end()) throw ValidationError("unknown resource: " + std::string(name));
    return it->second;
}

std::vector<std::string> embedded_resource_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : detail::embedded_resources()) names.push_back(name);
    return names;
}

std::string load_resource(std::string_view name, const fs::path& override_dir) {
    if (!override_dir.empty()) {
        fs::path p = override_dir / std::string(name);
        if (fs::exists(p)) return read_file(p);
    }
    return std::string(embedded_resource(name));
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace qsynth::io
