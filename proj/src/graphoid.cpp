#include "cicheck/graphoid.hpp"

#include <algorithm>
#include <functional>

namespace cicheck {

namespace {

TripleKey canonical_key(VarSet x, VarSet y, VarSet z) {
    return x.bits() <= y.bits() ? TripleKey{x, y, z} : TripleKey{y, x, z};
}

// Calls f on every nonempty subset of s.
template <class F>
void for_each_nonempty_subset(VarSet s, F&& f) {
    const std::uint64_t all = s.bits();
    for (std::uint64_t sub = all; sub != 0; sub = (sub - 1) & all) f(VarSet(sub));
}

}  // namespace

bool GraphoidClosure::has(VarSet x, VarSet y, VarSet z) const { return known_.contains(canonical_key(x, y, z)); }

void GraphoidClosure::derive(VarSet x, VarSet y, VarSet z) {
    if (conflict_ || cap_hit_) return;
    const TripleKey k = canonical_key(x, y, z);
    if (!known_.insert(k).second) return;
    order_.push_back(k);
    pending_.push_back(k);
    if (forbidden_.contains(k)) {
        conflict_ = k;
        return;
    }
    if (known_.size() > cap_) cap_hit_ = true;
}

void GraphoidClosure::expand(VarSet x, VarSet y, VarSet z) {
    if (y.size() > 1) {
        y.for_each([&](int v) {
            const VarSet sv = VarSet::single(v);
            if (axioms_.has(Axiom::Decomposition)) derive(x, y - sv, z);
            if (axioms_.has(Axiom::WeakUnion)) derive(x, y - sv, z | sv);
        });
    }
    if (axioms_.has(Axiom::Contraction)) {
        // as first premise: x ⊥ w | z∪y already processed
        if (auto it = by_xz_.find({x.bits(), (z | y).bits()}); it != by_xz_.end()) {
            const std::vector<VarSet>& ws = it->second;
            for (VarSet w : ws) derive(x, y | w, z);
        }
        // as second premise x ⊥ y | z' with z' = z0∪s: needs x ⊥ s | z0
        for_each_nonempty_subset(z, [&](VarSet s) {
            if (has(x, s, z - s)) derive(x, y | s, z - s);
        });
    }
    if (axioms_.has(Axiom::Intersection)) {
        // x ⊥ y | z0∪w and x ⊥ w | z0∪y
        for_each_nonempty_subset(z, [&](VarSet w) {
            const VarSet z0 = z - w;
            if (has(x, w, z0 | y)) derive(x, y | w, z0);
        });
    }
    if (axioms_.has(Axiom::Composition)) {
        if (auto it = by_xz_.find({x.bits(), z.bits()}); it != by_xz_.end()) {
            const std::vector<VarSet>& ws = it->second;
            for (VarSet w : ws) {
                if (w != y) derive(x, y | w, z);
            }
        }
    }
}

void GraphoidClosure::saturate() {
    std::size_t head = 0;
    while (head < pending_.size() && !conflict_ && !cap_hit_) {
        const TripleKey k = pending_[head++];
        expand(k.x, k.y, k.z);
        by_xz_[{k.x.bits(), k.z.bits()}].push_back(k.y);
        expand(k.y, k.x, k.z);
        by_xz_[{k.y.bits(), k.z.bits()}].push_back(k.x);
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(head));
}

bool GraphoidClosure::add(const CIStatement& s) {
    validate(s);
    if (!s.independent) throw ValidationError("graphoid closure takes independence statements only");
    derive(s.x, s.y, s.z);
    saturate();
    return !conflict_ && !cap_hit_;
}

bool GraphoidClosure::add_all(std::span<const CIStatement> statements) {
    for (const auto& s : statements) {
        validate(s);
        if (!s.independent) throw ValidationError("graphoid closure takes independence statements only");
        derive(s.x, s.y, s.z);
    }
    saturate();
    return !conflict_ && !cap_hit_;
}

namespace {

struct Branch {
    TripleKey a;
    TripleKey b;
};

// First violated disjunctive rule instance in the closure, scanning in derivation order.
std::optional<Branch> find_violation(const GraphoidClosure& c, int width, AxiomSet axioms) {
    const auto has = [&](VarSet x, VarSet y, VarSet z) { return c.contains(canonical_key(x, y, z)); };
    const bool wt = axioms.has(Axiom::WeakTransitivity);
    const bool ch = axioms.has(Axiom::Chordality);
    for (const TripleKey& k : c.statements()) {
        if (wt) {
            const VarSet used = k.x | k.y | k.z;
            for (int u = 0; u < width; ++u) {
                if (used.contains(u)) continue;
                const VarSet su = VarSet::single(u);
                if (!has(k.x, k.y, k.z | su)) continue;
                if (has(k.x, su, k.z) || has(su, k.y, k.z)) continue;
                return Branch{canonical_key(k.x, su, k.z), canonical_key(su, k.y, k.z)};
            }
        }
        if (ch && k.x.size() == 1 && k.y.size() == 1 && k.z.size() == 2) {
            const std::vector<int> zw = k.z.members();
            const VarSet z = VarSet::single(zw[0]);
            const VarSet w = VarSet::single(zw[1]);
            if (has(z, w, k.x | k.y) && !has(k.x, k.y, z) && !has(k.x, k.y, w)) {
                return Branch{canonical_key(k.x, k.y, z), canonical_key(k.x, k.y, w)};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

WitnessResult witness_search(std::span<const CIStatement> statements, const WitnessOptions& options) {
    WitnessResult out;
    GraphoidClosure root(options.axioms, options.closure_cap);
    int width = 0;
    std::vector<CIStatement> indep;
    for (const auto& s : statements) {
        validate(s);
        width = std::max(width, support(s).span());
        if (s.independent) {
            indep.push_back(s);
        } else {
            root.forbid(key_of(canonicalize(s)));
        }
    }
    ++out.nodes;
    root.add_all(indep);
    if (root.cap_hit()) return out;
    if (root.conflict()) {
        out.result = StageResult::Inconsistent;
        return out;
    }

    bool exhausted = false;
    // Depth-first over the disjunctions; returns the satisfying closure if found.
    std::function<std::optional<std::vector<TripleKey>>(const GraphoidClosure&)> search =
        [&](const GraphoidClosure& c) -> std::optional<std::vector<TripleKey>> {
        const auto violation = find_violation(c, width, options.axioms);
        if (!violation) return c.statements();
        for (const TripleKey& pick : {violation->a, violation->b}) {
            if (out.nodes >= options.node_budget) {
                exhausted = true;
                return std::nullopt;
            }
            ++out.nodes;
            GraphoidClosure next = c;
            next.add({pick.x, pick.y, pick.z, true});
            if (next.cap_hit()) {
                exhausted = true;
                return std::nullopt;
            }
            if (next.conflict()) continue;
            if (auto found = search(next)) return found;
            if (exhausted) return std::nullopt;
        }
        return std::nullopt;
    };

    if (auto model = search(root)) {
        out.result = StageResult::Consistent;
        out.model = std::move(*model);
        std::sort(out.model.begin(), out.model.end());
    } else if (!exhausted) {
        out.result = StageResult::Inconsistent;
    }
    return out;
}

bool satisfies_axioms(const std::vector<TripleKey>& independent, int width, AxiomSet axioms) {
    if (width < 1 || width > 6) throw ValidationError("exhaustive axiom check supports widths 1..6");
    std::unordered_set<TripleKey, TripleKeyHash> ind;
    for (const auto& k : independent) {
        if (!is_valid_triple(k.x, k.y, k.z)) return false;
        ind.insert(k);
    }
    const auto I = [&](std::uint64_t x, std::uint64_t y, std::uint64_t z) {
        return ind.contains(canonical_key(VarSet(x), VarSet(y), VarSet(z)));
    };
    const auto V = [](std::uint64_t x, std::uint64_t y, std::uint64_t z) {
        return is_valid_triple(VarSet(x), VarSet(y), VarSet(z));
    };
    const auto one = [](std::uint64_t u) { return std::popcount(u) == 1; };
    const std::uint64_t n = std::uint64_t{1} << width;

    for (std::uint64_t x = 1; x < n; ++x) {
        for (std::uint64_t y = 1; y < n; ++y) {
            for (std::uint64_t z = 0; z < n; ++z) {
                for (std::uint64_t w = 0; w < n; ++w) {
                    const std::uint64_t yw = y | w;
                    if (axioms.has(Axiom::Decomposition) && w != 0 && V(x, yw, z) && V(x, y, z) && I(x, yw, z) &&
                        !I(x, y, z)) {
                        return false;
                    }
                    if (axioms.has(Axiom::WeakUnion) && w != 0 && V(x, yw, z) && V(x, y, z | w) && I(x, yw, z) &&
                        !I(x, y, z | w)) {
                        return false;
                    }
                    if (w == 0) continue;
                    if (axioms.has(Axiom::Contraction) && V(x, y, z) && V(x, w, z | y) && V(x, yw, z) &&
                        I(x, y, z) && I(x, w, z | y) && !I(x, yw, z)) {
                        return false;
                    }
                    if (axioms.has(Axiom::Intersection) && V(x, y, z | w) && V(x, w, z | y) && V(x, yw, z) &&
                        I(x, y, z | w) && I(x, w, z | y) && !I(x, yw, z)) {
                        return false;
                    }
                    if (axioms.has(Axiom::Composition) && V(x, y, z) && V(x, w, z) && V(x, yw, z) && I(x, y, z) &&
                        I(x, w, z) && !I(x, yw, z)) {
                        return false;
                    }
                    if (axioms.has(Axiom::Chordality) && one(x) && one(y) && one(z) && one(w) &&
                        V(x, y, z | w) && V(z, w, x | y) && V(x, y, z) && V(x, y, w) && I(x, y, z | w) &&
                        I(z, w, x | y) && !I(x, y, z) && !I(x, y, w)) {
                        return false;
                    }
                }
                if (axioms.has(Axiom::WeakTransitivity) && V(x, y, z) && I(x, y, z)) {
                    for (int b = 0; b < width; ++b) {
                        const std::uint64_t u = std::uint64_t{1} << b;
                        if (V(x, y, z | u) && V(x, u, z) && V(u, y, z) && I(x, y, z | u) && !I(x, u, z) &&
                            !I(u, y, z)) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    return true;
}

}  // namespace cicheck
