#include "cicheck/solver.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace cicheck {

namespace {

// z3 gives up on model-based quantifier instantiation after 1000 rounds by default,
// which is too few for consistent instances over five or more variables.
const std::vector<std::string> kZ3Args = {"smt.mbqi.max_iterations=100000000"};

class TempScript {
public:
    explicit TempScript(const std::string& text) {
        const auto dir = std::filesystem::temp_directory_path();
        std::string pattern = (dir / "cicheck-XXXXXX.smt2").string();
        const int fd = mkstemps(pattern.data(), 5);
        if (fd < 0) throw std::runtime_error("cannot create temporary script file");
        path_ = pattern;
        std::size_t off = 0;
        while (off < text.size()) {
            const ssize_t n = ::write(fd, text.data() + off, text.size() - off);
            if (n <= 0) {
                ::close(fd);
                throw std::runtime_error("cannot write temporary script file");
            }
            off += static_cast<std::size_t>(n);
        }
        ::close(fd);
    }
    ~TempScript() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempScript(const TempScript&) = delete;
    TempScript& operator=(const TempScript&) = delete;

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string_view to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Sat: return "sat";
        case SolverStatus::Unsat: return "unsat";
        case SolverStatus::Unknown: return "unknown";
    }
    return "?";
}

std::optional<std::string> find_executable(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name.find('/') != std::string::npos) {
        if (::access(name.c_str(), X_OK) == 0 && !std::filesystem::is_directory(name)) return name;
        return std::nullopt;
    }
    const char* path = std::getenv("PATH");
    if (path == nullptr) return std::nullopt;
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
        if (dir.empty()) continue;
        const auto candidate = (std::filesystem::path(dir) / name).string();
        if (::access(candidate.c_str(), X_OK) == 0 && !std::filesystem::is_directory(candidate)) return candidate;
    }
    return std::nullopt;
}

SolverConfig SolverConfig::resolve(std::optional<std::string> explicit_path) {
    std::string requested;
    if (explicit_path && !explicit_path->empty()) {
        requested = *explicit_path;
    } else if (const char* env = std::getenv("CICHECK_SOLVER"); env != nullptr && *env != '\0') {
        requested = env;
    } else {
        requested = "z3";
    }
    auto found = find_executable(requested);
    if (!found) throw SolverConfigError("SMT solver executable not found: " + requested);
    SolverConfig cfg;
    cfg.executable = *found;
    if (std::filesystem::path(*found).filename() == "z3") cfg.extra_args = kZ3Args;
    return cfg;
}

SolverStatus parse_solver_status(const std::string& output) {
    std::istringstream in(output);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.rfind("(warning", 0) == 0 || t.rfind(";", 0) == 0) continue;
        if (t == "sat") return SolverStatus::Sat;
        if (t == "unsat") return SolverStatus::Unsat;
        if (t == "unknown" || t == "timeout") return SolverStatus::Unknown;
        break;
    }
    throw SolverProtocolError("unrecognised solver output", output);
}

SolverOutcome solve_external(const std::string& script, int timeout_ms, const SolverConfig& config,
                             std::stop_token stop) {
    if (config.executable.empty() || !find_executable(config.executable)) {
        throw SolverConfigError("SMT solver executable not found: " + config.executable);
    }
    const auto start = std::chrono::steady_clock::now();
    TempScript file(script);

    int pipefd[2];
    if (::pipe2(pipefd, O_CLOEXEC) != 0) throw std::runtime_error("pipe failed");

    std::vector<std::string> args;
    args.push_back(config.executable);
    args.insert(args.end(), config.extra_args.begin(), config.extra_args.end());
    args.push_back(file.path());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, pipefd[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, pipefd[1], STDERR_FILENO);
    pid_t pid = 0;
    const int rc = posix_spawn(&pid, config.executable.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(pipefd[1]);
    if (rc != 0) {
        ::close(pipefd[0]);
        throw SolverConfigError("cannot launch " + config.executable);
    }

    SolverOutcome outcome;
    const auto deadline = start + std::chrono::milliseconds(std::max(timeout_ms, 0));
    bool killed = false;
    char buf[4096];
    for (;;) {
        const auto now = std::chrono::steady_clock::now();
        if (!killed && (now >= deadline || stop.stop_requested())) {
            ::kill(pid, SIGKILL);
            killed = true;
            outcome.cancelled = stop.stop_requested() && now < deadline;
            outcome.timed_out = !outcome.cancelled;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        pollfd pfd{pipefd[0], POLLIN, 0};
        const int wait_ms = killed ? 100 : static_cast<int>(std::clamp<long long>(left, 1, 20));
        const int pr = ::poll(&pfd, 1, wait_ms);
        if (pr > 0) {
            const ssize_t n = ::read(pipefd[0], buf, sizeof buf);
            if (n > 0) {
                outcome.raw.append(buf, static_cast<std::size_t>(n));
                continue;
            }
            break;  // EOF
        }
        if (pr < 0 && errno != EINTR) break;
    }
    ::close(pipefd[0]);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    outcome.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (killed) {
        outcome.status = SolverStatus::Unknown;
        return outcome;
    }
    outcome.status = parse_solver_status(outcome.raw);
    return outcome;
}

}  // namespace cicheck
