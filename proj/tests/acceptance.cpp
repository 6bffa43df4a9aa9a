// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "cicheck/harness.hpp"
#include "cicheck/random.hpp"
#include "test_util.hpp"

using namespace cicheck;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Run {
    int code = -1;
    std::string out;
    double ms = 0.0;
};

Run cli(const std::string& args) {
    const std::string cmd = std::string(CICHECK_CLI) + " " + args + " 2>&1";
    Run r;
    const auto t0 = Clock::now();
    FILE* p = ::popen(cmd.c_str(), "r");
    if (p == nullptr) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = ::pclose(p);
    r.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(prec);
    s << v;
    return s.str();
}

// The random DAGs shared by criteria 2, 3 and 7.
std::vector<DAG> suite_dags() {
    std::vector<DAG> out;
    for (int i = 0; i < 20; ++i) out.push_back(sample_er_dag(3 + i % 3, 0.5, 100 + static_cast<std::uint64_t>(i)));
    return out;
}

std::vector<CIStatement> full_dsep_set(const DAG& g) { return enumerate_dsep_statements(g, g.size() - 2); }

DecideConfig solver_pipeline() {
    // The four-stage pipeline without the native witness search, so consistency is
    // established by the solver rather than by a constructed model.
    DecideConfig c;
    c.witness = false;
    c.solver = testing::solver_or_skip();
    return c;
}

Outcome criterion1() {
    const std::string file = std::string(CICHECK_DATA_DIR) + "/collider_flip.jsonl";
    const Run all = cli("check " + file);
    const Run o2 = cli("check --no-o3 --no-smt " + file);
    std::string verdict_all, verdict_o2, stage_o2;
    try {
        verdict_all = nlohmann::json::parse(all.out)["verdict"];
        const auto j = nlohmann::json::parse(o2.out);
        verdict_o2 = j["verdict"];
        stage_o2 = j["stage"];
    } catch (const std::exception& e) {
        return {false, std::string("unparseable output: ") + e.what()};
    }
    const double worst = std::max(all.ms, o2.ms);
    const bool pass = all.code == 1 && verdict_all == "inconsistent" && o2.code == 1 &&
                      verdict_o2 == "inconsistent" && stage_o2 == "o2" && worst < 2000.0;
    return {pass, "default=" + verdict_all + " (exit " + std::to_string(all.code) + "), no-o3/no-smt=" +
                      verdict_o2 + " via " + stage_o2 + ", slowest " + fmt(worst, 1) + " ms (limit 2000)"};
}

Outcome criterion2() {
    if (!testing::solver_or_skip()) return {false, "no SMT solver found"};
    const CirEngine engine(solver_pipeline());
    int consistent = 0, sat = 0, unknown = 0, by_o1 = 0;
    const auto t0 = Clock::now();
    for (const DAG& g : suite_dags()) {
        const Decision d = engine.decide(CirInstance::make(full_dsep_set(g), g.size()));
        if (d.verdict == Verdict::Consistent) ++consistent;
        if (d.trace.full_status == SolverStatus::Sat) ++sat;
        if (d.trace.unknown_as_consistent) ++unknown;
        if (d.trace.concluded_by == Stage::O1) ++by_o1;
    }
    const double s = ms_since(t0) / 1000.0;
    const bool pass = consistent == 20 && s <= 900.0;
    return {pass, std::to_string(consistent) + "/20 consistent (full SMT sat " + std::to_string(sat) +
                      ", unknown " + std::to_string(unknown) + ", o1 " + std::to_string(by_o1) + "), " +
                      fmt(s, 1) + " s (limit 900)"};
}

// Index of the first independence derivable from the other independences by graphoid
// saturation; failing that, the first statement whose flip O2 refutes.
std::optional<std::size_t> pick_flip(const std::vector<CIStatement>& sigma, int width) {
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!sigma[i].independent) continue;
        GraphoidClosure c;
        for (std::size_t j = 0; j < sigma.size(); ++j) {
            if (j != i && sigma[j].independent) c.add(sigma[j]);
        }
        if (c.contains(key_of(sigma[i]))) return i;
    }
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        auto flipped = sigma;
        flipped[i] = negate(flipped[i]);
        if (o2_graphoid(CirInstance::make(flipped, width)) == StageResult::Inconsistent) return i;
    }
    return std::nullopt;
}

Outcome criterion3() {
    if (!testing::solver_or_skip()) return {false, "no SMT solver found"};
    const CirEngine pipeline(solver_pipeline());
    DecideConfig smt_only = solver_pipeline();
    smt_only.o1 = smt_only.o2 = false;
    const CirEngine solver_only(smt_only);
    int refuted = 0, refuted_by_solver = 0, derivable = 0, eligible = 0;
    std::string ineligible;
    // A DAG whose set admits no O2-refutable flip (a complete DAG has no independences at
    // all) cannot take part; the solver must confirm every single flip of it is consistent,
    // and the next seed from the same generator takes its place.
    std::vector<DAG> dags = suite_dags();
    std::uint64_t next_seed = 120;
    for (std::size_t k = 0; k < dags.size() && eligible < 20; ++k) {
        const DAG g = dags[k];
        const auto sigma = full_dsep_set(g);
        const auto pick = pick_flip(sigma, g.size());
        if (!pick) {
            bool all_consistent = true;
            for (std::size_t i = 0; i < sigma.size(); ++i) {
                auto flipped = sigma;
                flipped[i] = negate(flipped[i]);
                const auto d = solver_only.decide(CirInstance::make(flipped, g.size()), flipped[i]);
                if (d.verdict != Verdict::Consistent || d.trace.full_status != SolverStatus::Sat) all_consistent = false;
            }
            if (!all_consistent) return {false, "DAG " + std::to_string(k) + " has a refutable flip that O2 misses"};
            ineligible += (ineligible.empty() ? "" : ",") + std::to_string(k);
            const std::uint64_t s = next_seed++;
            dags.push_back(sample_er_dag(3 + static_cast<int>(s % 3), 0.5, s));
            continue;
        }
        ++eligible;
        if (sigma[*pick].independent) ++derivable;
        auto flipped = sigma;
        flipped[*pick] = negate(flipped[*pick]);
        const auto inst = CirInstance::make(flipped, g.size());
        if (pipeline.decide(inst, flipped[*pick]).verdict == Verdict::Inconsistent) ++refuted;
        if (solver_only.decide(inst, flipped[*pick]).verdict == Verdict::Inconsistent) ++refuted_by_solver;
    }
    const bool pass = eligible == 20 && refuted == 20 && refuted_by_solver == 20;
    return {pass, std::to_string(refuted) + "/" + std::to_string(eligible) + " inconsistent (o3+full alone: " +
                      std::to_string(refuted_by_solver) + "; derivable independence flipped in " +
                      std::to_string(derivable) + "); no refutable flip exists for DAG " +
                      (ineligible.empty() ? "none" : ineligible) + ", replaced by the next seed"};
}

PcRunReport pc_run(const DAG& g, CheckerMode mode) {
    CheckerOptions o;
    o.mode = mode;
    o.decide.solver = testing::solver_or_skip();
    Checker c(o, std::make_shared<OracleTest>(g));
    return run_pc(g.domain(), c);
}

Outcome criterion4() {
    double sum = 0.0;
    int identical = 0;
    int repeats = 0, plain_total = 0;
    std::string counts;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const DAG g = sample_er_dag(5, kDefaultEdgeProb, s);
        const auto plain = pc_run(g, CheckerMode::Off);
        const auto p = pc_run(g, CheckerMode::P);
        if (p.pdag == plain.pdag) ++identical;
        const double red = plain.tests == 0 ? 0.0 : 1.0 - static_cast<double>(p.tests) / plain.tests;
        sum += red;
        counts += (s ? "," : "") + std::to_string(plain.tests) + "->" + std::to_string(p.tests);
        // queries that repeat an earlier triple exactly, for context
        std::set<TripleKey> seen;
        for (const auto& rec : plain.log) {
            if (!seen.insert(key_of(rec.result.statement)).second) ++repeats;
        }
        plain_total += plain.tests;
    }
    const double mean = sum / 10.0;
    const bool pass = mean >= 0.30 && identical == 10;
    return {pass, "mean reduction " + fmt(100.0 * mean, 1) + "% (limit 30%), identical PDAG " +
                      std::to_string(identical) + "/10, tests " + counts + "; exact repeats " +
                      std::to_string(repeats) + "/" + std::to_string(plain_total) + " of baseline tests"};
}

Outcome criterion5() {
    CheckerOptions ed;
    ed.mode = CheckerMode::Ed;
    ed.ed_policy = EdPolicy::Abort;
    ed.decide.solver = testing::solver_or_skip();
    int detected = 0;
    double sens = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DAG g = sample_er_dag(6, kDefaultEdgeProb, s);
        const BackendFactory f = [&g] { return std::make_shared<OracleTest>(g); };
        const auto ex = run_pc_experiment(g.domain(), f, ed, InjectionSpec::parse("rate=5"), s);
        if (ex.first_alarm) {
            ++detected;
            sens += ex.detection_position.value_or(0.0);
        }
    }
    const double rate = detected / 20.0;
    const double mean = detected ? sens / detected : 1.0;
    const bool pass = rate >= 0.90 && mean <= 0.20;
    return {pass, "detected " + std::to_string(detected) + "/20 (limit 18), mean sensitivity " + fmt(mean) +
                      " (limit 0.20)"};
}

Outcome criterion6() {
    if (!testing::solver_or_skip()) return {false, "no SMT solver found"};
    const DAG g = sample_er_dag(8, 0.3, 1);
    const auto sigma = oracle_log(g);
    std::vector<BenchInstance> corpus;
    for (int i = 0; i < 100; ++i) {
        BenchInstance inst;
        inst.source = "oracle-8-" + std::to_string(i);
        inst.statements = corrupt_statements(sigma, 5.0, 1000 + static_cast<std::uint64_t>(i), &inst.flipped);
        corpus.push_back(std::move(inst));
    }
    DecideConfig base;
    base.solver = testing::solver_or_skip();
    const auto r =
        run_bench(corpus, {bench_config("o2", base), bench_config("full", base), bench_config("o2+o3+full", base)}, 1);
    const auto& o2 = r.summary[0];
    const auto& full = r.summary[1];
    const auto& combo = r.summary[2];
    const bool pass = o2.refuted >= 70 && combo.refuted == 100 && o2.median_ms * 5.0 <= full.median_ms;
    return {pass, "|log|=" + std::to_string(sigma.size()) + ", o2 " + std::to_string(o2.refuted) +
                      "/100 (limit 70) median " + fmt(o2.median_ms) + " ms, full " + std::to_string(full.refuted) +
                      "/100 median " + fmt(full.median_ms) + " ms, o2+o3+full " + std::to_string(combo.refuted) +
                      "/100"};
}

Outcome criterion7() {
    if (!testing::solver_or_skip()) return {false, "no SMT solver found"};
    const auto dir = testing::scratch_dir("acceptance-timeout");
    int ok = 0, unknown = 0;
    std::string failure;
    int i = 0;
    for (const DAG& g : suite_dags()) {
        const fs::path file = dir / ("dsep-" + std::to_string(i++) + ".jsonl");
        {
            std::ofstream out(file);
            write_statements(out, g.domain(), full_dsep_set(g));
        }
        const Run r = cli("check --timeout-ms 1 --no-witness " + file.string());
        try {
            const auto j = nlohmann::json::parse(r.out);
            if (r.code == 0 && j["verdict"] == "consistent") ++ok;
            if (j["full_status"] == "unknown") ++unknown;
        } catch (const std::exception&) {
            if (failure.empty()) failure = "; unparseable output from " + file.filename().string();
        }
    }
    fs::remove_all(dir);
    const bool pass = ok == 20 && unknown == 20;
    return {pass, std::to_string(ok) + "/20 consistent with exit 0, " + std::to_string(unknown) +
                      "/20 full status unknown" + failure};
}

Outcome criterion8() {
    int false_dep = 0, copy_dep = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(s);
        const double px = 0.2 + 0.6 * rng.uniform(), py = 0.2 + 0.6 * rng.uniform();
        Dataset indep, copy;
        indep.names = copy.names = {"A", "B"};
        for (int k = 0; k < 10000; ++k) {
            const int a = rng.bernoulli(px), b = rng.bernoulli(py);
            indep.rows.push_back({a, b});
            copy.rows.push_back({a, a});
        }
        const CIQuery q{VarSet::single(0), VarSet::single(1), {}, 0};
        if (!chi2_test(indep, q, 0.05).statement.independent) ++false_dep;
        if (!chi2_test(copy, q, 0.05).statement.independent) ++copy_dep;
    }
    const bool pass = false_dep <= 10 && copy_dep == 100;
    return {pass, "independent pairs declared dependent " + std::to_string(false_dep) +
                      "/100 (limit 10), copies declared dependent " + std::to_string(copy_dep) + "/100"};
}

Outcome criterion9() {
    long checked = 0, mismatches = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const int n = 2 + static_cast<int>(s % 5);
        const double p = 0.2 + 0.15 * static_cast<double>(s % 4);
        const DAG g = sample_er_dag(n, p, 500 + s);
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        for (std::uint64_t x = 1; x <= full; ++x) {
            for (std::uint64_t y = 1; y <= full; ++y) {
                if (x & y) continue;
                const std::uint64_t rest = full & ~(x | y);
                for (std::uint64_t z = rest;; z = (z - 1) & rest) {
                    ++checked;
                    if (d_separated(g, VarSet(x), VarSet(y), VarSet(z)) !=
                        testing::brute_force_d_separated(g, VarSet(x), VarSet(y), VarSet(z))) {
                        ++mismatches;
                    }
                    if (z == 0) break;
                }
            }
        }
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over " + std::to_string(checked) + " queries"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"collider regression", criterion1},      {"soundness on d-separation sets", criterion2},
        {"refutation of flipped sets", criterion3}, {"p-check pruning", criterion4},
        {"ed-check detection", criterion5},    {"optimization ablation", criterion6},
        {"timeout policy", criterion7},        {"chi-squared sanity", criterion8},
        {"d-separation oracle", criterion9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt(ms_since(t0) / 1000.0, 1) << " s]" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
