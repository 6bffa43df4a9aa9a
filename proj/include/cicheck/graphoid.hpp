#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cicheck/core_model.hpp"
#include "cicheck/smt_encoding.hpp"

namespace cicheck {

inline constexpr std::size_t kDefaultGraphoidCap = 100000;

/// Independence statements saturated under the definite axioms: symmetry (canonical keys),
/// element-wise decomposition and weak union, contraction, intersection and composition.
/// Rules whose axiom is absent from `axioms` are skipped.
class GraphoidClosure {
public:
    explicit GraphoidClosure(AxiomSet axioms = AxiomSet::all(), std::size_t cap = kDefaultGraphoidCap)
        : axioms_(axioms), cap_(cap) {}

    /// Forbids a triple; deriving it makes the closure conflicting.
    void forbid(const TripleKey& k) { forbidden_.insert(k); }
    /// Adds an independence statement (canonical) and saturates. Returns false on conflict or cap.
    bool add(const CIStatement& s);
    bool add_all(std::span<const CIStatement> statements);

    bool contains(const TripleKey& k) const { return known_.contains(k); }
    std::size_t size() const { return known_.size(); }
    bool conflict() const { return conflict_.has_value(); }
    /// First forbidden triple that was derived.
    const std::optional<TripleKey>& conflicting_triple() const { return conflict_; }
    bool cap_hit() const { return cap_hit_; }
    /// All derived statements, canonical keys in derivation order.
    const std::vector<TripleKey>& statements() const { return order_; }

private:
    struct XZ {
        std::uint64_t x, z;
        bool operator==(const XZ&) const = default;
    };
    struct XZHash {
        std::size_t operator()(const XZ& k) const noexcept {
            return static_cast<std::size_t>(k.x * 0x9E3779B97F4A7C15ULL ^ (k.z + 0x632BE59BD9B4E019ULL));
        }
    };

    bool has(VarSet x, VarSet y, VarSet z) const;
    void derive(VarSet x, VarSet y, VarSet z);
    void saturate();
    void expand(VarSet x, VarSet y, VarSet z);

    AxiomSet axioms_;
    std::size_t cap_;
    std::unordered_set<TripleKey, TripleKeyHash> known_;
    std::unordered_set<TripleKey, TripleKeyHash> forbidden_;
    /// Oriented statements grouped by (x, z): the y operands seen so far.
    std::unordered_map<XZ, std::vector<VarSet>, XZHash> by_xz_;
    std::vector<TripleKey> order_;
    std::vector<TripleKey> pending_;
    std::optional<TripleKey> conflict_;
    bool cap_hit_ = false;
};

struct WitnessOptions {
    AxiomSet axioms = AxiomSet::all();
    std::size_t closure_cap = kDefaultGraphoidCap;
    /// Search nodes (closures built) before giving up.
    std::size_t node_budget = 4096;
};

struct WitnessResult {
    StageResult result = StageResult::Inconclusive;
    /// Independent triples of the model when consistent; every other valid triple is dependent.
    std::vector<TripleKey> model;
    std::size_t nodes = 0;
};

/// Decides a statement set under all eight axioms (standard form) by building a model:
/// saturate the independences, then branch on each violated weak transitivity or
/// chordality instance. Consistent comes with a model, Inconsistent means every branch
/// derived a forbidden triple, Inconclusive means the budget or cap ran out.
WitnessResult witness_search(std::span<const CIStatement> statements, const WitnessOptions& options = {});

/// Checks a candidate model (independent triples) against every instance of the enabled
/// axioms over `width` variables by enumeration. Test-scale widths only.
bool satisfies_axioms(const std::vector<TripleKey>& independent, int width, AxiomSet axioms = AxiomSet::all());

}  // namespace cicheck
