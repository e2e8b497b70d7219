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

#include "qsynth/sandbox/executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "qsynth/util/error.hpp"
#include "qsynth/util/io.hpp"
#include "qsynth/util/text.hpp"

extern char** environ;

namespace qsynth::sandbox {

namespace fs = std::filesystem;

std::string_view to_string(ExitKind k) {
    switch (k) {
        case ExitKind::Ok: return "ok";
        case ExitKind::NonzeroExit: return "nonzero_exit";
        case ExitKind::Timeout: return "timeout";
        case ExitKind::LaunchFailure: return "launch_failure";
    }
    return "launch_failure";
}

ExitKind parse_exit_kind(std::string_view s) {
    if (s == "ok") return ExitKind::Ok;
    if (s == "nonzero_exit") return ExitKind::NonzeroExit;
    if (s == "timeout") return ExitKind::Timeout;
    if (s == "launch_failure") return ExitKind::LaunchFailure;
    throw ValidationError("unknown exit kind '" + std::string(s) + "'");
}

std::string ExecutionResult::failure_text() const {
    std::string out = stderr_text;
    for (const auto& t : tests)
        if (!t.passed && !t.message.empty()) out += "\n" + t.message;
    return out;
}

void to_json(nlohmann::json& j, const ExecutionResult& r) {
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : r.tests) tests.push_back({{"name", t.name}, {"passed", t.passed}, {"message", t.message}});
    j = {{"passed", r.passed},         {"tests_total", r.tests_total}, {"tests_passed", r.tests_passed},
         {"tests_loaded", r.tests_loaded}, {"tests", tests},          {"stdout", r.stdout_text},
         {"stderr", r.stderr_text},    {"wall_time", r.wall_time},     {"exit_kind", to_string(r.exit_kind)},
         {"exit_code", r.exit_code}};
}

void from_json(const nlohmann::json& j, ExecutionResult& r) {
    r = {};
    r.passed = j.at("passed").get<bool>();
    r.tests_total = j.at("tests_total").get<std::size_t>();
    r.tests_passed = j.at("tests_passed").get<std::size_t>();
    r.tests_loaded = j.value("tests_loaded", r.tests_total > 0);
    for (const auto& t : j.value("tests", nlohmann::json::array()))
        r.tests.push_back({t.at("name").get<std::string>(), t.at("passed").get<bool>(), t.value("message", "")});
    r.stdout_text = j.value("stdout", "");
    r.stderr_text = j.value("stderr", "");
    r.wall_time = j.value("wall_time", 0.0);
    r.exit_kind = parse_exit_kind(j.at("exit_kind").get<std::string>());
    r.exit_code = j.value("exit_code", -1);
}

std::optional<std::vector<TestOutcome>> parse_shim_output(std::string_view stdout_text) {
    auto lines = text::split_lines(stdout_text);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        auto line = text::trim(*it);
        if (line.empty() || line.front() != '{') continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("tests") || !j["tests"].is_array()) continue;
        std::vector<TestOutcome> out;
        bool ok = true;
        for (const auto& t : j["tests"]) {
            if (!t.is_object() || !t.contains("name") || !t["name"].is_string() || !t.contains("passed") ||
                !t["passed"].is_boolean()) {
                ok = false;
                break;
            }
            std::string msg;
            if (t.contains("message") && t["message"].is_string()) msg = t["message"].get<std::string>();
            out.push_back({t["name"].get<std::string>(), t["passed"].get<bool>(), msg});
        }
        if (ok) return out;
    }
    return std::nullopt;
}

namespace {

bool is_parse_failure(const std::string& message) {
    for (const char* k : {"SyntaxError", "IndentationError", "TabError"})
        if (message.find(k) != std::string::npos) return true;
    return false;
}

}  // namespace

void finalize(ExecutionResult& r, std::optional<std::vector<TestOutcome>> tests) {
    r.tests.clear();
    r.tests_total = r.tests_passed = 0;
    r.tests_loaded = false;
    if (tests) {
        r.tests = std::move(*tests);
        r.tests_total = r.tests.size();
        for (const auto& t : r.tests) r.tests_passed += t.passed;
        bool import_parse_failure =
            r.tests.size() == 1 && r.tests[0].name == "import" && !r.tests[0].passed && is_parse_failure(r.tests[0].message);
        r.tests_loaded = r.tests_total > 0 && !import_parse_failure;
    }
    r.passed = r.exit_kind == ExitKind::Ok && r.tests_loaded && r.tests_total > 0 && r.tests_passed == r.tests_total;
}

SubprocessExecutor::SubprocessExecutor(SubprocessOptions options)
    : options_(std::move(options)), slots_(std::max(1u, std::min(options_.max_concurrent, 1024u))) {
    if (options_.default_limit.count() <= 0) throw ValidationError("execution limit must be positive");
}

fs::path SubprocessExecutor::last_workspace() const {
    std::lock_guard<std::mutex> lock(mu_);
    return last_workspace_;
}

namespace {

struct SlotGuard {
    std::counting_semaphore<1024>& s;
    explicit SlotGuard(std::counting_semaphore<1024>& sem) : s(sem) { s.acquire(); }
    ~SlotGuard() { s.release(); }
};

fs::path make_workspace(const fs::path& root) {
    fs::path base = root.empty() ? fs::temp_directory_path() : root;
    fs::create_directories(base);
    std::string tmpl = (base / "qsynth-ws-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!::mkdtemp(buf.data())) throw IoError("cannot create workspace under " + base.string() + ": " + std::strerror(errno));
    return fs::path(buf.data());
}

constexpr std::size_t kProtocolCap = 8 * 1024 * 1024;

void append_capped(std::string& out, const char* data, std::size_t n, std::size_t cap, bool& truncated) {
    std::size_t room = out.size() < cap ? cap - out.size() : 0;
    out.append(data, std::min(n, room));
    if (n > room) truncated = true;
}

}  // namespace

ExecutionResult SubprocessExecutor::execute(std::string_view code, const rag::ChallengeTask& task,
                                            std::optional<std::chrono::duration<double>> limit) {
    auto lim = limit.value_or(options_.default_limit);
    if (lim.count() <= 0) throw ValidationError("execution limit must be positive");
    SlotGuard guard(slots_);
    fs::path ws = make_workspace(options_.temp_root);
    ExecutionResult r;
    try {
        io::write_file_atomic(ws / "solution.py", code);
        io::write_file_atomic(ws / "tests.py", task.tests_code);
        io::write_file_atomic(ws / "meta.json", task.meta.dump(2) + "\n");
        r = run(ws, lim);
    } catch (...) {
        std::error_code ec;
        if (!options_.keep_workspace) fs::remove_all(ws, ec);
        throw;
    }
    if (options_.keep_workspace) {
        std::lock_guard<std::mutex> lock(mu_);
        last_workspace_ = ws;
    } else {
        std::error_code ec;
        fs::remove_all(ws, ec);
    }
    return r;
}

ExecutionResult SubprocessExecutor::run(const fs::path& ws, std::chrono::duration<double> limit) {
    ExecutionResult r;
    auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    if (options_.shim_path.empty() || !fs::exists(options_.shim_path)) {
        r.exit_kind = ExitKind::LaunchFailure;
        r.stderr_text = "test shim not found: " + options_.shim_path.string();
        finalize(r, std::nullopt);
        return r;
    }

    int out_pipe[2], err_pipe[2], exec_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) || ::pipe2(err_pipe, O_CLOEXEC) || ::pipe2(exec_pipe, O_CLOEXEC))
        throw IoError(std::string("pipe: ") + std::strerror(errno));

    std::string shim = fs::absolute(options_.shim_path).string();
    std::string ws_str = ws.string();
    std::vector<std::string> args = {options_.python, shim, ws_str, "tests.py"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    std::vector<std::string> env_store;
    for (char** e = environ; e && *e; ++e) {
        std::string_view kv(*e);
        if (kv.rfind("PYTHONHASHSEED=", 0) == 0 || kv.rfind("PYTHONDONTWRITEBYTECODE=", 0) == 0) continue;
        env_store.emplace_back(kv);
    }
    env_store.push_back("PYTHONHASHSEED=0");
    env_store.push_back("PYTHONDONTWRITEBYTECODE=1");
    std::vector<char*> envp;
    for (auto& e : env_store) envp.push_back(e.data());
    envp.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) throw IoError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        if (::chdir(ws_str.c_str()) != 0) {
            int e = errno;
            (void)!::write(exec_pipe[1], &e, sizeof e);
            ::_exit(127);
        }
        ::execvpe(argv[0], argv.data(), envp.data());
        int e = errno;
        (void)!::write(exec_pipe[1], &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::close(exec_pipe[1]);

    int exec_errno = 0;
    ssize_t got = ::read(exec_pipe[0], &exec_errno, sizeof exec_errno);
    ::close(exec_pipe[0]);
    if (got == static_cast<ssize_t>(sizeof exec_errno)) {
        int status;
        ::waitpid(pid, &status, 0);
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        r.exit_kind = ExitKind::LaunchFailure;
        r.stderr_text = "cannot launch " + options_.python + ": " + std::strerror(exec_errno);
        r.wall_time = elapsed();
        finalize(r, std::nullopt);
        return r;
    }

    const double deadline = limit.count();
    bool timed_out = false;
    bool out_trunc = false, err_trunc = false, protocol_trunc = false;
    std::string protocol;
    pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    int open_fds = 2;
    char buf[8192];
    while (open_fds > 0) {
        double left = deadline - elapsed();
        if (left <= 0) {
            timed_out = true;
            break;
        }
        int rc = ::poll(fds, 2, static_cast<int>(std::min(left * 1000.0, 1000.0)) + 1);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
            if (n <= 0) {
                if (n < 0 && errno == EINTR) continue;
                ::close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
                continue;
            }
            if (i == 0) {
                append_capped(r.stdout_text, buf, static_cast<std::size_t>(n), options_.output_cap, out_trunc);
                append_capped(protocol, buf, static_cast<std::size_t>(n), kProtocolCap, protocol_trunc);
            } else {
                append_capped(r.stderr_text, buf, static_cast<std::size_t>(n), options_.output_cap, err_trunc);
            }
        }
    }

    int status = 0;
    bool reaped = false;
    while (!timed_out) {
        pid_t w = ::waitpid(pid, &status, WNOHANG);
        if (w == pid) {
            reaped = true;
            break;
        }
        if (w < 0 && errno != EINTR) break;
        if (elapsed() >= deadline) {
            timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::kill(-pid, SIGKILL);
    if (!reaped) {
        ::kill(pid, SIGKILL);
        while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
        }
    }
    for (auto& f : fds)
        if (f.fd >= 0) ::close(f.fd);
    r.wall_time = elapsed();

    if (out_trunc) r.stdout_text += "\n[output truncated]";
    if (err_trunc) r.stderr_text += "\n[output truncated]";
    if (timed_out) {
        r.exit_kind = ExitKind::Timeout;
        r.exit_code = -1;
        finalize(r, std::nullopt);
        r.tests_loaded = false;
        return r;
    }
    if (WIFEXITED(status)) {
        r.exit_code = WEXITSTATUS(status);
        r.exit_kind = r.exit_code == 0 ? ExitKind::Ok : ExitKind::NonzeroExit;
    } else {
        r.exit_code = WIFSIGNALED(status) ? 128 + WTERMSIG(status) : -1;
        r.exit_kind = ExitKind::NonzeroExit;
    }
    finalize(r, parse_shim_output(protocol));
    return r;
}

}  // namespace qsynth::sandbox
