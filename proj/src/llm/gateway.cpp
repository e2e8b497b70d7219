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

#include "qsynth/llm/gateway.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "qsynth/util/io.hpp"

namespace qsynth::llm {

void ChatRequest::validate() const {
    if (messages.empty()) throw ValidationError("chat request has no messages");
    bool has_user = false;
    for (const auto& m : messages) {
        if (m.role != "system" && m.role != "user" && m.role != "assistant")
            throw ValidationError("unknown message role: " + m.role);
        has_user = has_user || m.role == "user";
    }
    if (!has_user) throw ValidationError("chat request needs a user message");
    if (!(temperature >= 0)) throw ValidationError("temperature must be >= 0");
    if (max_tokens <= 0) throw ValidationError("max_tokens must be positive");
}

ChatRequest ChatRequest::simple(std::string system, std::string user) {
    ChatRequest req;
    if (!system.empty()) req.messages.push_back({"system", std::move(system)});
    req.messages.push_back({"user", std::move(user)});
    return req;
}

namespace {

class SemaphoreSlot {
public:
    explicit SemaphoreSlot(std::counting_semaphore<>& s) : s_(s) { s_.acquire(); }
    ~SemaphoreSlot() { s_.release(); }
    SemaphoreSlot(const SemaphoreSlot&) = delete;
    SemaphoreSlot& operator=(const SemaphoreSlot&) = delete;

private:
    std::counting_semaphore<>& s_;
};

}  // namespace

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, GatewayOptions options)
    : provider_(std::move(provider)), options_(std::move(options)), slots_(std::max(1, options_.max_in_flight)) {
    if (!provider_) throw ValidationError("gateway needs a provider");
    if (options_.max_retries < 0) throw ValidationError("max_retries must be >= 0");
    if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

ChatResponse Gateway::chat_traced(const ChatRequest& req) {
    req.validate();
    ++calls_;
    SemaphoreSlot slot(slots_);
    auto backoff = options_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        ++attempts_;
        auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        };
        try {
            std::string text = provider_->complete(req);
            log_attempt(req, attempt, "ok", text, elapsed());
            return ChatResponse{std::move(text), attempt};
        } catch (const AuthError& e) {
            log_attempt(req, attempt, "auth_error", e.what(), elapsed());
            throw;
        } catch (const TransientError& e) {
            log_attempt(req, attempt, "transient_error", e.what(), elapsed());
            if (attempt > options_.max_retries)
                throw GatewayError("giving up after " + std::to_string(attempt) + " attempts: " + e.what());
        } catch (const GatewayError& e) {
            log_attempt(req, attempt, "error", e.what(), elapsed());
            throw;
        }
        options_.sleep(backoff);
        backoff = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(backoff.count()) * options_.backoff_factor));
    }
}

void Gateway::log_attempt(const ChatRequest& req, int attempt, const std::string& status, const std::string& response,
                          double latency_ms) {
    if (options_.log_path.empty()) return;
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : req.messages) {
        if (options_.redact_contents) {
            messages.push_back({{"role", m.role}, {"chars", m.content.size()}});
        } else {
            messages.push_back({{"role", m.role}, {"content", m.content}});
        }
    }
    nlohmann::json row = {
        {"ts", io::utc_timestamp()},
        {"provider", provider_->id()},
        {"model", req.model_id},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
        {"attempt", attempt},
        {"status", status},
        {"latency_ms", latency_ms},
        {"messages", messages},
    };
    if (options_.redact_contents) {
        row["response_chars"] = response.size();
    } else {
        row["response"] = response;
    }
    std::lock_guard<std::mutex> lock(log_mu_);
    if (options_.log_path.has_parent_path()) std::filesystem::create_directories(options_.log_path.parent_path());
    std::ofstream out(options_.log_path, std::ios::app);
    out << row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

std::string redact(std::string text, const std::vector<std::string>& secrets) {
    for (const auto& s : secrets) {
        if (s.empty()) continue;
        std::size_t pos = 0;
        while ((pos = text.find(s, pos)) != std::string::npos) {
            text.replace(pos, s.size(), "[redacted]");
            pos += 10;
        }
    }
    return text;
}

}  // namespace qsynth::llm
