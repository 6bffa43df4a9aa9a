#pragma once

#include <optional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

namespace cicheck {

enum class SolverStatus { Sat, Unsat, Unknown };

std::string_view to_string(SolverStatus s);

struct SolverOutcome {
    SolverStatus status = SolverStatus::Unknown;
    double wall_ms = 0.0;
    std::string raw;
    bool timed_out = false;
    bool cancelled = false;
};

class SolverConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverProtocolError : public std::runtime_error {
public:
    SolverProtocolError(const std::string& what, std::string raw) : std::runtime_error(what), raw_(std::move(raw)) {}
    const std::string& raw_output() const { return raw_; }

private:
    std::string raw_;
};

/// An SMT solver executable that takes a script path as its last argument.
struct SolverConfig {
    std::string executable;
    std::vector<std::string> extra_args;

    /// Explicit path, else $CICHECK_SOLVER, else `z3` from PATH. Throws SolverConfigError if
    /// nothing executable is found.
    static SolverConfig resolve(std::optional<std::string> explicit_path = std::nullopt);
};

/// Locates an executable by path or PATH lookup.
std::optional<std::string> find_executable(const std::string& name);

/// Runs the solver on `script` in a temporary file. Expiry of `timeout_ms` or a stop request
/// kills the process and yields Unknown.
SolverOutcome solve_external(const std::string& script, int timeout_ms, const SolverConfig& config,
                             std::stop_token stop = {});

/// First status line of solver output; throws SolverProtocolError if there is none.
SolverStatus parse_solver_status(const std::string& output);

}  // namespace cicheck
