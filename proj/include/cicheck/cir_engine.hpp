#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cicheck/core_model.hpp"
#include "cicheck/graphoid.hpp"
#include "cicheck/smt_encoding.hpp"
#include "cicheck/solver.hpp"

namespace cicheck {

/// Σ over a domain of `width` variables (indices 0..width-1).
struct CirInstance {
    int width = 0;
    std::vector<CIStatement> statements;

    /// Validates and canonicalizes; width defaults to the highest variable used.
    static CirInstance make(std::vector<CIStatement> statements, int width = 0);
};

enum class Stage { O1, O2, Witness, O3, Full };
std::string_view to_string(Stage s);

struct StageRecord {
    Stage stage;
    StageResult result = StageResult::Inconclusive;
    double ms = 0.0;
};

struct DecisionTrace {
    std::vector<StageRecord> stages;
    /// The stage whose result was taken as the verdict. Empty when no stage ran to a
    /// conclusion and the default (consistent) verdict was returned.
    std::optional<Stage> concluded_by;
    int subproblems = 0;
    int solver_calls = 0;
    /// Status of the full SMT instance if it ran to completion or timed out.
    std::optional<SolverStatus> full_status;
    /// True when some solver answer was UNKNOWN (timeout included) and read as consistent.
    bool unknown_as_consistent = false;
    double total_ms = 0.0;
};

struct Decision {
    Verdict verdict = Verdict::Consistent;
    DecisionTrace trace;
};

struct DecideConfig {
    bool o1 = true;
    bool o2 = true;
    bool witness = true;
    bool o3 = true;
    bool full = true;
    std::size_t graphoid_cap = kDefaultGraphoidCap;
    std::size_t witness_budget = 4096;
    AxiomSet axioms = AxiomSet::all();
    AxiomForm form = AxiomForm::Standard;
    int timeout_ms = 60000;
    /// Required only when a solver stage runs; resolved lazily from the environment otherwise.
    std::optional<SolverConfig> solver;
};

StageResult o1_marginality(const CirInstance& inst, AxiomForm form = AxiomForm::Standard);
StageResult o2_graphoid(const CirInstance& inst, std::size_t cap = kDefaultGraphoidCap,
                        AxiomSet axioms = AxiomSet::all());

struct Subproblem {
    Axiom axiom;
    CirInstance instance;
};

/// One single-axiom instance per enabled axiom over Σ* ∪ {γ}, Σ* being the statements of Σ
/// that share a variable with γ.
std::vector<Subproblem> o3_subproblems(const CirInstance& inst, const CIStatement& gamma,
                                       AxiomSet axioms = AxiomSet::all());

class CirEngine {
public:
    explicit CirEngine(DecideConfig config = {}) : config_(std::move(config)) {}

    const DecideConfig& config() const { return config_; }

    /// Consistency of Σ. `incoming` seeds O3; without it the last statement of Σ does.
    Decision decide(const CirInstance& inst, const std::optional<CIStatement>& incoming = std::nullopt) const;

private:
    DecideConfig config_;
};

}  // namespace cicheck
