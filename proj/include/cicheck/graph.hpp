#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cicheck/core_model.hpp"

namespace cicheck {

/// Directed acyclic graph; acyclicity is checked on construction.
class DAG {
public:
    DAG() = default;
    /// Throws ValidationError on cycles, self loops, or out-of-range endpoints.
    DAG(Domain domain, const std::vector<std::pair<int, int>>& edges);
    DAG(int n, const std::vector<std::pair<int, int>>& edges);

    int size() const { return domain_.size(); }
    const Domain& domain() const { return domain_; }
    VarSet parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
    VarSet children(int v) const { return children_[static_cast<std::size_t>(v)]; }
    bool has_edge(int from, int to) const { return children(from).contains(to); }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }
    /// Edges (parent, child) sorted lexicographically.
    std::vector<std::pair<int, int>> edges() const;
    std::size_t edge_count() const;
    const std::vector<int>& topological_order() const { return topo_; }
    /// Descendants of the set, including the set itself.
    VarSet descendants(VarSet s) const;
    VarSet ancestors(VarSet s) const;

    bool operator==(const DAG& o) const { return domain_ == o.domain_ && children_ == o.children_; }

private:
    Domain domain_;
    std::vector<VarSet> parents_;
    std::vector<VarSet> children_;
    std::vector<int> topo_;
};

/// Partially directed graph: each adjacent pair is either directed or undirected.
class PDAG {
public:
    PDAG() = default;
    explicit PDAG(Domain domain);
    explicit PDAG(int n) : PDAG(Domain::anonymous(n)) {}
    static PDAG complete(Domain domain);
    static PDAG from_dag(const DAG& g);

    int size() const { return domain_.size(); }
    const Domain& domain() const { return domain_; }

    void add_undirected(int a, int b);
    /// Sets a -> b, replacing any existing mark between a and b.
    void orient(int a, int b);
    void remove(int a, int b);

    bool adjacent(int a, int b) const { return neighbors(a).contains(b); }
    bool is_directed(int from, int to) const { return out_[idx(from)].contains(to); }
    bool is_undirected(int a, int b) const { return und_[idx(a)].contains(b); }
    VarSet neighbors(int v) const { return out_[idx(v)] | in_[idx(v)] | und_[idx(v)]; }
    VarSet undirected_neighbors(int v) const { return und_[idx(v)]; }
    VarSet parents(int v) const { return in_[idx(v)]; }
    VarSet children(int v) const { return out_[idx(v)]; }

    std::vector<std::pair<int, int>> directed_edges() const;
    std::vector<std::pair<int, int>> undirected_edges() const;

    bool operator==(const PDAG& o) const {
        return domain_ == o.domain_ && out_ == o.out_ && und_ == o.und_;
    }

private:
    static std::size_t idx(int v) { return static_cast<std::size_t>(v); }

    Domain domain_;
    std::vector<VarSet> out_;
    std::vector<VarSet> in_;
    std::vector<VarSet> und_;
};

/// Separating sets keyed by unordered node pair.
class SepsetTable {
public:
    void record(int a, int b, VarSet s);
    std::optional<VarSet> get(int a, int b) const;
    const std::map<std::pair<int, int>, VarSet>& entries() const { return table_; }
    bool operator==(const SepsetTable&) const = default;

private:
    std::map<std::pair<int, int>, VarSet> table_;
};

/// True iff every path between x and y is blocked by z (linear-time reachability).
bool d_separated(const DAG& g, VarSet x, VarSet y, VarSet z);

/// All singleton-pair statements with conditioning sets up to `max_cond`, flag from d-separation.
/// Order: pairs (i<j) lexicographic, then by conditioning size, then lexicographic subsets.
std::vector<CIStatement> enumerate_dsep_statements(const DAG& g, int max_cond);

struct OrientOptions {
    bool meek_r4 = false;
};

struct Orientation {
    PDAG graph;
    /// Collider marks that overwrote an opposite orientation.
    int conflicts = 0;
};

/// Collider detection on unshielded triples followed by Meek's rules to a fixed point.
Orientation orient_cpdag(const PDAG& skeleton, const SepsetTable& sepsets, OrientOptions options = {});

/// Meek R1-R3 (and optionally R4) applied in place until nothing changes.
void apply_meek_rules(PDAG& g, bool meek_r4 = false);

/// Structural Hamming distance: one per node pair whose edge mark differs.
int shd(const PDAG& a, const PDAG& b);

/// Erdős–Rényi DAG: each pair included with `edge_prob`, oriented along a random permutation.
DAG sample_er_dag(int n, double edge_prob, std::uint64_t seed);

/// CPDAG of a DAG: its skeleton with the v-structures oriented and Meek's rules applied.
PDAG cpdag_of(const DAG& g);

// JSON: {"n":int,"names":[...],"edges":[[parent,child],...]}; PDAG adds "undirected".
std::string dag_to_json(const DAG& g);
DAG dag_from_json(const std::string& text);
std::string pdag_to_json(const PDAG& g);
PDAG pdag_from_json(const std::string& text);

}  // namespace cicheck
