#include "cicheck/checkers.hpp"

namespace cicheck {

std::string_view to_string(CheckerMode m) {
    switch (m) {
        case CheckerMode::Off: return "off";
        case CheckerMode::Ed: return "ed";
        case CheckerMode::P: return "p";
    }
    return "?";
}

std::string_view to_string(CheckAction a) {
    switch (a) {
        case CheckAction::Tested: return "tested";
        case CheckAction::Entailed: return "entailed";
        case CheckAction::Aborted: return "aborted";
    }
    return "?";
}

CheckerMode parse_checker_mode(std::string_view s) {
    if (s == "off") return CheckerMode::Off;
    if (s == "ed") return CheckerMode::Ed;
    if (s == "p") return CheckerMode::P;
    throw ValidationError("unknown checker mode: " + std::string(s));
}

Checker::Checker(CheckerOptions options, std::shared_ptr<CITest> backend)
    : options_(std::move(options)),
      backend_(std::move(backend)),
      engine_(options_.decide),
      kb_(options_.inconsistency_threshold) {
    if (!backend_) throw ValidationError("checker needs a CI-test backend");
    if (options_.inconsistency_threshold < 1) throw ValidationError("inconsistency threshold must be positive");
}

CITestResult Checker::run_backend(const CIQuery& q) {
    ++backend_calls_;
    CIQuery issued = q;
    issued.sequence_index = backend_calls_;
    CITestResult r = backend_->test(issued);
    r.statement = canonicalize(r.statement);
    return r;
}

Decision Checker::check(const CIStatement& gamma) {
    ++decide_calls_;
    std::vector<CIStatement> sigma = kb_.statements();
    sigma.push_back(gamma);
    return engine_.decide(CirInstance::make(std::move(sigma)), gamma);
}

void Checker::commit(const CIStatement& s) { kb_.add(s, /*snapshot_before=*/true); }

CheckOutcome Checker::query(const CIQuery& q) {
    switch (options_.mode) {
        case CheckerMode::Ed: return ed_check(q);
        case CheckerMode::P: return p_check(q);
        case CheckerMode::Off: break;
    }
    ++queries_;
    CheckOutcome out;
    out.result = run_backend(q);
    out.backend_calls = 1;
    return out;
}

CheckOutcome Checker::ed_check(const CIQuery& q) {
    ++queries_;
    CheckOutcome out;
    out.result = run_backend(q);
    out.backend_calls = 1;
    const CIStatement gamma = out.result.statement;
    if (kb_.contains(gamma)) return out;
    Decision d = check(gamma);
    out.trace = d.trace;
    if (d.verdict == Verdict::Consistent) {
        commit(gamma);
        return out;
    }
    ++alarms_;
    if (options_.ed_policy == EdPolicy::Abort) throw CheckAborted(out.result, std::move(d.trace), queries_);
    out.alarm = true;
    return out;
}

void Checker::register_inconsistency() {
    if (kb_.snapshot_count() > 0) {
        kb_.rollback();
    } else {
        // Nothing left to undo; treat as exhausted.
        fallback_active_ = true;
        return;
    }
    if (kb_.fallback_triggered()) fallback_active_ = true;
}

CheckOutcome Checker::p_check(const CIQuery& q) {
    ++queries_;
    CheckOutcome out;
    const CIStatement gamma = canonicalize(make_statement(q.x, q.y, q.z, true));
    while (!fallback_active_) {
        Decision with_gamma = check(gamma);
        Decision with_negation = check(negate(gamma));
        const bool gamma_bad = with_gamma.verdict == Verdict::Inconsistent;
        const bool negation_bad = with_negation.verdict == Verdict::Inconsistent;
        if (gamma_bad && negation_bad) {
            register_inconsistency();
            continue;
        }
        if (gamma_bad || negation_bad) {
            out.result.statement = gamma_bad ? negate(gamma) : gamma;
            out.result.source = ResultSource::Entailed;
            out.action = CheckAction::Entailed;
            out.trace = gamma_bad ? std::move(with_gamma.trace) : std::move(with_negation.trace);
            ++entailed_;
            if (options_.commit_entailed && !kb_.contains(out.result.statement)) commit(out.result.statement);
            return out;
        }
        break;
    }
    out.result = run_backend(q);
    out.backend_calls = 1;
    if (!fallback_active_ && !kb_.contains(out.result.statement)) commit(out.result.statement);
    return out;
}

}  // namespace cicheck
