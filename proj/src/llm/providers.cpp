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

#include "qsynth/llm/providers.hpp"

#include <cstdlib>

#include "qsynth/util/http.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

namespace qsynth::llm {

namespace {

std::string last_user_message(const ChatRequest& req) {
    for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it)
        if (it->role == "user") return it->content;
    return {};
}

std::string echo_code(const std::string& user) {
    auto pos = user.rfind("Code:");
    if (pos == std::string::npos) return text::trim(user);
    return text::trim(std::string_view(user).substr(pos + 5));
}

ScriptStep::Kind parse_failure_kind(const std::string& s) {
    if (s == "transient") return ScriptStep::Kind::Transient;
    if (s == "auth") return ScriptStep::Kind::Auth;
    if (s == "fatal") return ScriptStep::Kind::Fatal;
    throw ValidationError("unknown failure kind in mock script: " + s);
}

ScriptStep parse_step(const nlohmann::json& j) {
    if (j.is_string()) return ScriptStep::reply(j.get<std::string>());
    if (j.contains("fail")) return ScriptStep::fail(parse_failure_kind(j["fail"].get<std::string>()), j.value("message", "injected failure"));
    return ScriptStep::reply(j.at("reply").get<std::string>());
}

}  // namespace

ScriptedProvider& ScriptedProvider::enqueue(std::string reply) { return enqueue(ScriptStep::reply(std::move(reply))); }

ScriptedProvider& ScriptedProvider::enqueue(ScriptStep step) {
    std::lock_guard<std::mutex> lock(mu_);
    queue_.push_back(std::move(step));
    return *this;
}

ScriptedProvider& ScriptedProvider::add_rule(const std::string& pattern, std::string reply) {
    return add_rule(pattern, ScriptStep::reply(std::move(reply)));
}

ScriptedProvider& ScriptedProvider::add_rule(const std::string& pattern, ScriptStep step) {
    std::lock_guard<std::mutex> lock(mu_);
    try {
        rules_.push_back({std::regex(pattern), std::move(step)});
    } catch (const std::regex_error& e) {
        throw ValidationError("invalid mock rule pattern '" + pattern + "': " + e.what());
    }
    return *this;
}

ScriptedProvider& ScriptedProvider::set_fallback(std::string reply) {
    std::lock_guard<std::mutex> lock(mu_);
    fallback_ = std::move(reply);
    return *this;
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_json(const nlohmann::json& script, std::string id) {
    auto p = std::make_shared<ScriptedProvider>(std::move(id));
    for (const auto& r : script.value("rules", nlohmann::json::array()))
        p->add_rule(r.at("pattern").get<std::string>(), parse_step(r));
    for (const auto& q : script.value("queue", nlohmann::json::array())) p->enqueue(parse_step(q));
    if (script.contains("fallback")) p->set_fallback(script["fallback"].get<std::string>());
    return p;
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::load(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(path.string() + ": mock script must be a JSON object");
    return from_json(j, "mock:" + path.filename().string());
}

std::string ScriptedProvider::complete(const ChatRequest& req) {
    ScriptStep step;
    std::string user = last_user_message(req);
    {
        std::lock_guard<std::mutex> lock(mu_);
        requests_.push_back(req);
        bool found = false;
        for (const auto& rule : rules_) {
            if (std::regex_search(user, rule.pattern)) {
                step = rule.step;
                found = true;
                break;
            }
        }
        if (!found) {
            if (!queue_.empty()) {
                step = std::move(queue_.front());
                queue_.pop_front();
            } else if (fallback_) {
                step = ScriptStep::reply(*fallback_);
            } else {
                throw GatewayError("mock script exhausted");
            }
        }
    }
    switch (step.kind) {
        case ScriptStep::Kind::Transient: throw TransientError(step.text);
        case ScriptStep::Kind::Auth: throw AuthError(step.text);
        case ScriptStep::Kind::Fatal: throw GatewayError(step.text);
        case ScriptStep::Kind::Reply: break;
    }
    if (step.text.find("{{echo_code}}") != std::string::npos)
        return text::render(step.text, {{"echo_code", echo_code(user)}});
    return step.text;
}

std::vector<ChatRequest> ScriptedProvider::requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_;
}

std::size_t ScriptedProvider::call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return requests_.size();
}

std::size_t ScriptedProvider::queued() const {
    std::lock_guard<std::mutex> lock(mu_);
    return queue_.size();
}

void throw_for_status(int status, const std::string& detail) {
    std::string msg = "HTTP " + std::to_string(status) + ": " + detail.substr(0, 500);
    if (status == 401 || status == 403) throw AuthError(msg);
    if (status == 0 || status == 408 || status == 409 || status == 429 || status >= 500) throw TransientError(msg);
    throw GatewayError(msg);
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ValidationError("provider " + config_.id + " has no base_url");
}

nlohmann::json HttpChatProvider::request_body(const ChatRequest& req) const {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    return {
        {"model", req.model_id.empty() ? config_.model : req.model_id},
        {"messages", messages},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };
}

std::string HttpChatProvider::parse_response(const std::string& body) {
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw GatewayError("provider returned non-JSON body");
    try {
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_null()) return {};
        return content.get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw GatewayError("unexpected chat response shape");
    }
}

std::string HttpChatProvider::complete(const ChatRequest& req) {
    std::map<std::string, std::string> headers = config_.headers;
    std::string key;
    if (!config_.api_key_env.empty()) {
        const char* v = std::getenv(config_.api_key_env.c_str());
        if (!v || !*v) throw AuthError("environment variable " + config_.api_key_env + " is not set");
        key = v;
        headers["Authorization"] = "Bearer " + key;
    }
    std::string url = config_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    auto res = http::post_json(url + "/chat/completions", headers, request_body(req).dump(), config_.timeout_seconds);
    if (res.status == 0) throw TransientError(redact(res.error, {key}));
    if (res.status != 200) throw_for_status(res.status, redact(res.body, {key}));
    return parse_response(res.body);
}

}  // namespace qsynth::llm
