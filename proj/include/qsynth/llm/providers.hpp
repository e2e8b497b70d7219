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

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/llm/gateway.hpp"

namespace qsynth::llm {

/// One scripted provider action.
struct ScriptStep {
    enum class Kind { Reply, Transient, Auth, Fatal };
    Kind kind = Kind::Reply;
    std::string text;

    static ScriptStep reply(std::string t) { return {Kind::Reply, std::move(t)}; }
    static ScriptStep fail(Kind k, std::string msg = "injected failure") { return {k, std::move(msg)}; }
};

/// Deterministic provider for tests and offline runs.
///
/// On each request the regex rules are tried first, in insertion order,
/// against the last user message; the first match answers. Otherwise the FIFO
/// queue is popped, then the fallback reply is used, and with none of those
/// the call fails with GatewayError.
///
/// A reply containing `{{echo_code}}` has it replaced by the text following the
/// last "Code:" marker of the last user message.
class ScriptedProvider : public ChatProvider {
public:
    explicit ScriptedProvider(std::string id = "mock") : id_(std::move(id)) {}

    ScriptedProvider& enqueue(std::string reply);
    ScriptedProvider& enqueue(ScriptStep step);
    ScriptedProvider& add_rule(const std::string& pattern, std::string reply);
    ScriptedProvider& add_rule(const std::string& pattern, ScriptStep step);
    ScriptedProvider& set_fallback(std::string reply);

    /// {"rules":[{"pattern":..,"reply":..}|{"pattern":..,"fail":"transient|auth|fatal"}],
    ///  "queue":[string|{"fail":..}], "fallback": string}
    static std::shared_ptr<ScriptedProvider> from_json(const nlohmann::json& script, std::string id = "mock");
    static std::shared_ptr<ScriptedProvider> load(const std::filesystem::path& path);

    std::string id() const override { return id_; }
    std::string complete(const ChatRequest& req) override;

    std::vector<ChatRequest> requests() const;
    std::size_t call_count() const;
    std::size_t queued() const;

private:
    struct Rule {
        std::regex pattern;
        ScriptStep step;
    };

    std::string id_;
    mutable std::mutex mu_;
    std::vector<Rule> rules_;
    std::deque<ScriptStep> queue_;
    std::optional<std::string> fallback_;
    std::vector<ChatRequest> requests_;
};

struct HttpProviderConfig {
    std::string id = "http";
    /// Base URL; requests go to `<base_url>/chat/completions`.
    std::string base_url;
    std::string model;
    /// Name of the environment variable holding the bearer token.
    std::string api_key_env;
    std::map<std::string, std::string> headers;
    int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client.
class HttpChatProvider : public ChatProvider {
public:
    explicit HttpChatProvider(HttpProviderConfig config);

    std::string id() const override { return config_.id; }
    std::string complete(const ChatRequest& req) override;

    /// Request body for `req`, exposed for tests.
    nlohmann::json request_body(const ChatRequest& req) const;
    /// Extracts choices[0].message.content. Throws GatewayError on other shapes.
    static std::string parse_response(const std::string& body);

private:
    HttpProviderConfig config_;
};

/// Maps an HTTP status to the error class the gateway retries on.
[[noreturn]] void throw_for_status(int status, const std::string& detail);

}  // namespace qsynth::llm
