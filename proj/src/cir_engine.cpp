#include "cicheck/cir_engine.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

namespace cicheck {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

CirInstance CirInstance::make(std::vector<CIStatement> statements, int width) {
    CirInstance inst;
    int span = 0;
    for (auto& s : statements) {
        validate(s);
        s = canonicalize(s);
        span = std::max(span, support(s).span());
    }
    if (width != 0 && width < span) throw ValidationError("statement references a variable beyond the instance width");
    if (width > kMaxVariables) throw ValidationError("instance width exceeds the supported maximum");
    inst.width = width == 0 ? span : width;
    inst.statements = std::move(statements);
    return inst;
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::O1: return "o1";
        case Stage::O2: return "o2";
        case Stage::Witness: return "witness";
        case Stage::O3: return "o3";
        case Stage::Full: return "full";
    }
    return "?";
}

StageResult o1_marginality(const CirInstance& inst, AxiomForm form) {
    std::unordered_map<TripleKey, unsigned, TripleKeyHash> flags;
    bool all_marginal_pairs = true;
    bool degenerate_marginal = false;
    for (const auto& s : inst.statements) {
        const CIStatement c = canonicalize(s);
        const bool marginal = is_marginal(c);
        if (!marginal || c.x.size() != 1 || c.y.size() != 1) all_marginal_pairs = false;
        unsigned& f = flags[key_of(c)];
        f |= c.independent ? 1U : 2U;
        if (f == 3U && marginal) degenerate_marginal = true;
    }
    if (degenerate_marginal) return StageResult::Inconsistent;
    // Set-valued marginals are excluded: {X⊥Y, X⊥Z, X⊥̸YZ} is refuted by composition.
    // The verbatim form of weak transitivity is a definite rule that can also refute
    // purely marginal sets, so the shortcut only holds for the standard form.
    if (all_marginal_pairs && form == AxiomForm::Standard) return StageResult::Consistent;
    return StageResult::Inconclusive;
}

StageResult o2_graphoid(const CirInstance& inst, std::size_t cap, AxiomSet axioms) {
    if (!axioms.has(Axiom::Symmetry)) return StageResult::Inconclusive;
    GraphoidClosure closure(axioms, std::max(cap, inst.statements.size()));
    std::vector<CIStatement> indep;
    for (const auto& s : inst.statements) {
        if (s.independent) {
            indep.push_back(canonicalize(s));
        } else {
            closure.forbid(key_of(canonicalize(s)));
        }
    }
    closure.add_all(indep);
    return closure.conflict() ? StageResult::Inconsistent : StageResult::Inconclusive;
}

std::vector<Subproblem> o3_subproblems(const CirInstance& inst, const CIStatement& gamma, AxiomSet axioms) {
    validate(gamma);
    const CIStatement g = canonicalize(gamma);
    std::vector<CIStatement> related;
    for (const auto& s : inst.statements) {
        if (s == g) continue;
        if (!overlap(s, g).empty()) related.push_back(s);
    }
    related.push_back(g);
    std::vector<Subproblem> out;
    for (Axiom a : axioms.members()) {
        CirInstance sub;
        sub.width = std::max(inst.width, support(g).span());
        sub.statements = related;
        out.push_back({a, std::move(sub)});
    }
    return out;
}

namespace {

struct Job {
    Stage stage = Stage::Full;
    std::string script;
    bool done = false;
    SolverOutcome outcome;
    std::exception_ptr error;
    double finished_ms = 0.0;
};

}  // namespace

Decision CirEngine::decide(const CirInstance& inst, const std::optional<CIStatement>& incoming) const {
    const auto t0 = Clock::now();
    Decision d;
    auto& trace = d.trace;
    const auto finish = [&](Verdict v, std::optional<Stage> by) {
        d.verdict = v;
        trace.concluded_by = by;
        trace.total_ms = ms_since(t0);
        return d;
    };

    if (config_.o1) {
        const auto ts = Clock::now();
        const StageResult r = o1_marginality(inst, config_.form);
        trace.stages.push_back({Stage::O1, r, ms_since(ts)});
        if (r == StageResult::Consistent) return finish(Verdict::Consistent, Stage::O1);
        if (r == StageResult::Inconsistent) return finish(Verdict::Inconsistent, Stage::O1);
    }
    if (config_.o2) {
        const auto ts = Clock::now();
        const StageResult r = o2_graphoid(inst, config_.graphoid_cap, config_.axioms);
        trace.stages.push_back({Stage::O2, r, ms_since(ts)});
        if (r == StageResult::Inconsistent) return finish(Verdict::Inconsistent, Stage::O2);
    }
    if (config_.witness && config_.form == AxiomForm::Standard && config_.axioms.has(Axiom::Symmetry)) {
        const auto ts = Clock::now();
        WitnessOptions wo;
        wo.axioms = config_.axioms;
        wo.closure_cap = config_.graphoid_cap;
        wo.node_budget = config_.witness_budget;
        const WitnessResult w = witness_search(inst.statements, wo);
        trace.stages.push_back({Stage::Witness, w.result, ms_since(ts)});
        if (w.result == StageResult::Consistent) return finish(Verdict::Consistent, Stage::Witness);
        if (w.result == StageResult::Inconsistent) return finish(Verdict::Inconsistent, Stage::Witness);
    }

    const int width = std::max(inst.width, 1);
    std::vector<Job> jobs;
    const auto add_job = [&jobs](Stage stage, std::string script) {
        jobs.emplace_back();
        jobs.back().stage = stage;
        jobs.back().script = std::move(script);
    };
    if (config_.full) {
        add_job(Stage::Full, emit_smtlib(make_instance(width, inst.statements, config_.axioms, config_.form)));
    }
    const std::optional<CIStatement> gamma =
        incoming ? incoming : (inst.statements.empty() ? std::nullopt : std::optional(inst.statements.back()));
    if (config_.o3 && gamma) {
        for (const auto& sp : o3_subproblems(inst, *gamma, config_.axioms)) {
            const int w = std::max(sp.instance.width, 1);
            add_job(Stage::O3,
                    emit_smtlib(make_instance(w, sp.instance.statements, AxiomSet::only(sp.axiom), config_.form)));
            ++trace.subproblems;
        }
    }
    if (jobs.empty()) return finish(Verdict::Consistent, std::nullopt);

    const SolverConfig solver = config_.solver ? *config_.solver : SolverConfig::resolve();
    std::mutex mu;
    std::condition_variable cv;
    std::stop_source stop;
    std::optional<std::size_t> first_unsat;
    const auto ts = Clock::now();
    {
        std::vector<std::jthread> threads;
        threads.reserve(jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            threads.emplace_back([&, i] {
                SolverOutcome out;
                std::exception_ptr err;
                try {
                    out = solve_external(jobs[i].script, config_.timeout_ms, solver, stop.get_token());
                } catch (...) {
                    err = std::current_exception();
                }
                std::lock_guard lock(mu);
                jobs[i].outcome = std::move(out);
                jobs[i].error = err;
                jobs[i].done = true;
                jobs[i].finished_ms = ms_since(ts);
                if (!err && jobs[i].outcome.status == SolverStatus::Unsat && !first_unsat) first_unsat = i;
                cv.notify_all();
            });
        }
        std::unique_lock lock(mu);
        cv.wait(lock, [&] {
            if (first_unsat) return true;
            bool all_done = true;
            for (const auto& j : jobs) {
                if (j.error) return true;
                if (!j.done) all_done = false;
                // A definite SAT on the full instance settles it; UNKNOWN waits for the
                // subproblems, which share the timeout and may still refute.
                if (j.stage == Stage::Full && j.done && j.outcome.status == SolverStatus::Sat) return true;
            }
            return all_done;
        });
        stop.request_stop();
        lock.unlock();
    }

    trace.solver_calls = static_cast<int>(jobs.size());
    for (const auto& j : jobs) {
        if (j.error) std::rethrow_exception(j.error);
    }

    StageResult o3_result = StageResult::Inconclusive;
    double o3_ms = 0.0;
    std::optional<StageRecord> full_record;
    for (const auto& j : jobs) {
        const bool counted = j.done && !j.outcome.cancelled;
        if (j.stage == Stage::O3) {
            o3_ms = std::max(o3_ms, j.finished_ms);
            if (counted && j.outcome.status == SolverStatus::Unsat) o3_result = StageResult::Inconsistent;
            if (counted && j.outcome.status == SolverStatus::Unknown) trace.unknown_as_consistent = true;
        } else {
            StageResult r = StageResult::Inconclusive;
            if (counted) {
                trace.full_status = j.outcome.status;
                r = j.outcome.status == SolverStatus::Unsat ? StageResult::Inconsistent : StageResult::Consistent;
            }
            full_record = StageRecord{Stage::Full, r, j.finished_ms};
        }
    }
    if (trace.subproblems > 0) trace.stages.push_back({Stage::O3, o3_result, o3_ms});
    if (full_record) trace.stages.push_back(*full_record);

    if (first_unsat) return finish(Verdict::Inconsistent, jobs[*first_unsat].stage);
    if (trace.full_status) {
        if (*trace.full_status == SolverStatus::Unknown) trace.unknown_as_consistent = true;
        return finish(Verdict::Consistent, Stage::Full);
    }
    return finish(Verdict::Consistent, std::nullopt);
}

}  // namespace cicheck
