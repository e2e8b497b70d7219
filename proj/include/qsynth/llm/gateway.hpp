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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qsynth/util/error.hpp"

namespace qsynth::llm {

/// Any failure to obtain a completion.
class GatewayError : public Error {
public:
    using Error::Error;
};

/// A failure worth retrying (network error, rate limit, 5xx).
class TransientError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// Credentials rejected or missing. Never retried.
class AuthError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

struct Message {
    std::string role;  // system, user or assistant
    std::string content;
};

struct ChatRequest {
    std::vector<Message> messages;
    double temperature = 0.7;
    int max_tokens = 3000;
    std::string model_id;

    /// Throws ValidationError unless there is at least one user message, every
    /// role is known, temperature >= 0 and max_tokens > 0.
    void validate() const;

    static ChatRequest simple(std::string system, std::string user);
};

/// Backend that turns a request into assistant text.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string id() const = 0;
    /// Throws TransientError, AuthError or GatewayError.
    virtual std::string complete(const ChatRequest& req) = 0;
};

struct GatewayOptions {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_factor = 2.0;
    int max_in_flight = 4;
    /// Appends one JSON object per attempt when set.
    std::filesystem::path log_path;
    /// Replaces message and response contents with their length in the log.
    bool redact_contents = false;
    /// Injected by tests to avoid real sleeping.
    std::function<void(std::chrono::milliseconds)> sleep;
};

struct ChatResponse {
    std::string text;
    int attempts = 0;
};

/// Thread-safe front end: validation, bounded concurrency, retry with
/// exponential backoff, and request logging.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<ChatProvider> provider, GatewayOptions options = {});

    std::string chat(const ChatRequest& req) { return chat_traced(req).text; }
    ChatResponse chat_traced(const ChatRequest& req);

    const ChatProvider& provider() const { return *provider_; }
    std::size_t calls() const { return calls_.load(); }
    std::size_t attempts() const { return attempts_.load(); }

private:
    void log_attempt(const ChatRequest& req, int attempt, const std::string& status, const std::string& response,
                     double latency_ms);

    std::shared_ptr<ChatProvider> provider_;
    GatewayOptions options_;
    std::counting_semaphore<> slots_;
    std::mutex log_mu_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> attempts_{0};
};

/// Replaces every occurrence of each secret with "[redacted]".
std::string redact(std::string text, const std::vector<std::string>& secrets);

}  // namespace qsynth::llm
