#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "cicheck/ci_tests.hpp"
#include "cicheck/cir_engine.hpp"
#include "cicheck/core_model.hpp"

namespace cicheck {

enum class CheckerMode { Off, Ed, P };
/// What ED-Check does with an inconsistent test result.
enum class EdPolicy { Abort, Alert };
enum class CheckAction { Tested, Entailed, Aborted };

std::string_view to_string(CheckerMode m);
std::string_view to_string(CheckAction a);
CheckerMode parse_checker_mode(std::string_view s);

inline constexpr int kDefaultInconsistencyThreshold = 10;

struct CheckerOptions {
    CheckerMode mode = CheckerMode::Off;
    EdPolicy ed_policy = EdPolicy::Abort;
    int inconsistency_threshold = kDefaultInconsistencyThreshold;
    /// P-Check: add entailed answers to Σ so later queries can build on them.
    bool commit_entailed = true;
    DecideConfig decide;
};

struct CheckOutcome {
    CITestResult result;
    CheckAction action = CheckAction::Tested;
    /// Decision behind the outcome: ED-Check's consistency check, or the P-Check
    /// decision that produced the entailment.
    std::optional<DecisionTrace> trace;
    /// ED-Check in alert mode flagged this result as inconsistent (it was not committed).
    bool alarm = false;
    int backend_calls = 0;
};

/// ED-Check found the tested statement inconsistent with Σ under the abort policy.
class CheckAborted : public std::runtime_error {
public:
    CheckAborted(CITestResult result, DecisionTrace trace, int query_index)
        : std::runtime_error("inconsistent CI test result"),
          result_(std::move(result)),
          trace_(std::move(trace)),
          query_index_(query_index) {}
    const CITestResult& result() const { return result_; }
    const DecisionTrace& trace() const { return trace_; }
    /// 1-based position of the offending query in the run.
    int query_index() const { return query_index_; }

private:
    CITestResult result_;
    DecisionTrace trace_;
    int query_index_;
};

/// Wraps a CI-test backend with a knowledge base; one per causal-discovery run.
class Checker {
public:
    Checker(CheckerOptions options, std::shared_ptr<CITest> backend);

    /// Dispatches on the configured mode.
    CheckOutcome query(const CIQuery& q);
    CheckOutcome ed_check(const CIQuery& q);
    CheckOutcome p_check(const CIQuery& q);
    /// Rolls Σ back to the last snapshot and counts the inconsistency; at the threshold
    /// P-Check stops reasoning and forwards every query to the backend.
    void register_inconsistency();

    const CheckerOptions& options() const { return options_; }
    const KnowledgeBase& kb() const { return kb_; }
    bool fallback_active() const { return fallback_active_; }
    int queries() const { return queries_; }
    int backend_calls() const { return backend_calls_; }
    int entailed() const { return entailed_; }
    int decide_calls() const { return decide_calls_; }
    int alarms() const { return alarms_; }

private:
    CITestResult run_backend(const CIQuery& q);
    Decision check(const CIStatement& gamma);
    void commit(const CIStatement& s);

    CheckerOptions options_;
    std::shared_ptr<CITest> backend_;
    CirEngine engine_;
    KnowledgeBase kb_;
    bool fallback_active_ = false;
    int queries_ = 0;
    int backend_calls_ = 0;
    int entailed_ = 0;
    int decide_calls_ = 0;
    int alarms_ = 0;
};

}  // namespace cicheck
