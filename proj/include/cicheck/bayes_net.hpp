#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cicheck/graph.hpp"

namespace cicheck {

/// Categorical Bayesian network. cpts[v][row][k] = P(v = k | parents in assignment `row`),
/// where rows enumerate parent assignments lexicographically over parents sorted by index,
/// last parent varying fastest.
class DiscreteBayesNet {
public:
    using Cpt = std::vector<std::vector<double>>;

    DiscreteBayesNet(DAG dag, std::vector<int> cards, std::vector<Cpt> cpts);

    const DAG& dag() const { return dag_; }
    int size() const { return dag_.size(); }
    const std::vector<int>& cards() const { return cards_; }
    int card(int v) const { return cards_[static_cast<std::size_t>(v)]; }
    const Cpt& cpt(int v) const { return cpts_[static_cast<std::size_t>(v)]; }
    std::size_t row_count(int v) const;
    /// Row index of the parent assignment read from a full sample row.
    std::size_t row_of(int v, const std::vector<int>& values) const;

    bool operator==(const DiscreteBayesNet&) const = default;

private:
    DAG dag_;
    std::vector<int> cards_;
    std::vector<Cpt> cpts_;
};

struct Dataset {
    std::vector<std::string> names;
    /// rows[i][v]: category code of variable v in sample i.
    std::vector<std::vector<int>> rows;

    std::size_t samples() const { return rows.size(); }
    int columns() const { return static_cast<int>(names.size()); }
    bool operator==(const Dataset&) const = default;
};

inline constexpr double kDefaultDirichletAlpha = 1.0;

/// Every CPT row drawn from a symmetric Dirichlet(alpha).
DiscreteBayesNet sample_cpts(const DAG& dag, const std::vector<int>& cards, double alpha, std::uint64_t seed);

/// Ancestral sampling in topological order.
Dataset forward_sample(const DiscreteBayesNet& bn, std::size_t m, std::uint64_t seed);

// Network JSON: {"n","names","cards","edges","cpts":{name:[[p...],...]}}
std::string net_to_json(const DiscreteBayesNet& bn);
/// Strict: unknown fields, bad shapes and rows not summing to 1 (1e-9) are rejected.
DiscreteBayesNet net_from_json(const std::string& text);
void save_net(const std::string& path, const DiscreteBayesNet& bn);
DiscreteBayesNet load_net(const std::string& path);

// Dataset CSV: header of names, then integer codes; no quoting.
void write_csv(std::ostream& out, const Dataset& data);
Dataset read_csv(std::istream& in);

}  // namespace cicheck
