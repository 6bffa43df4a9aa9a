#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "cicheck/solver.hpp"
#include "test_util.hpp"

using namespace cicheck;
namespace fs = std::filesystem;

namespace {

// Writes an executable shell script standing in for a solver.
std::string fake_solver(const fs::path& dir, const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
    fs::permissions(p, fs::perms::owner_all);
    return p.string();
}

}  // namespace

TEST_CASE("status parsing") {
    CHECK(parse_solver_status("sat\n") == SolverStatus::Sat);
    CHECK(parse_solver_status("unsat") == SolverStatus::Unsat);
    CHECK(parse_solver_status("\n(warning blah)\nunknown\n") == SolverStatus::Unknown);
    CHECK(parse_solver_status("timeout\n") == SolverStatus::Unknown);
    CHECK_THROWS_AS(parse_solver_status(""), SolverProtocolError);
    CHECK_THROWS_AS(parse_solver_status("(error \"line 1\")\nsat\n"), SolverProtocolError);
    try {
        parse_solver_status("segfault");
    } catch (const SolverProtocolError& e) {
        CHECK(e.raw_output() == "segfault");
    }
}

TEST_CASE("fake solvers exercise the subprocess protocol") {
    const auto dir = testing::scratch_dir("solver");
    SolverConfig sat{fake_solver(dir, "sat.sh", "echo sat"), {}};
    const auto r = solve_external("(check-sat)\n", 5000, sat);
    CHECK(r.status == SolverStatus::Sat);
    CHECK_FALSE(r.timed_out);

    // the script path is the last argument
    SolverConfig echo{fake_solver(dir, "cat.sh", "tail -n 1 \"$1\""), {}};
    CHECK(solve_external("; x\nunsat\n", 5000, echo).status == SolverStatus::Unsat);

    SolverConfig garbage{fake_solver(dir, "junk.sh", "echo nonsense"), {}};
    CHECK_THROWS_AS(solve_external("(check-sat)\n", 5000, garbage), SolverProtocolError);

    SolverConfig slow{fake_solver(dir, "slow.sh", "exec sleep 30"), {}};
    const auto t = solve_external("(check-sat)\n", 200, slow);
    CHECK(t.status == SolverStatus::Unknown);
    CHECK(t.timed_out);
    CHECK(t.wall_ms < 5000);

    std::stop_source stop;
    std::thread canceller([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        stop.request_stop();
    });
    const auto c = solve_external("(check-sat)\n", 20000, slow, stop.get_token());
    canceller.join();
    CHECK(c.status == SolverStatus::Unknown);
    CHECK(c.cancelled);
    CHECK_FALSE(c.timed_out);
    fs::remove_all(dir);
}

TEST_CASE("solver resolution") {
    CHECK_THROWS_AS(SolverConfig::resolve("/nonexistent/solver"), SolverConfigError);
    CHECK_THROWS_AS(solve_external("(check-sat)\n", 100, SolverConfig{"/nonexistent/solver", {}}), SolverConfigError);
    const auto dir = testing::scratch_dir("resolve");
    const auto path = fake_solver(dir, "mysolver", "echo sat");
    ::setenv("CICHECK_SOLVER", path.c_str(), 1);
    const auto cfg = SolverConfig::resolve();
    ::unsetenv("CICHECK_SOLVER");
    CHECK(cfg.executable == path);
    CHECK(cfg.extra_args.empty());
    if (const auto z3 = testing::solver_or_skip(); z3 && fs::path(z3->executable).filename() == "z3") {
        CHECK_FALSE(z3->extra_args.empty());
    }
    fs::remove_all(dir);
}
