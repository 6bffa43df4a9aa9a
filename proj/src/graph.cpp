#include "cicheck/graph.hpp"

#include <algorithm>
#include <deque>

#include <nlohmann/json.hpp>

#include "cicheck/random.hpp"

namespace cicheck {

using ordered_json = nlohmann::ordered_json;

namespace {

void check_node(int v, int n) {
    if (v < 0 || v >= n) throw ValidationError("node index " + std::to_string(v) + " out of range");
}

}  // namespace

DAG::DAG(int n, const std::vector<std::pair<int, int>>& edges) : DAG(Domain::anonymous(n), edges) {}

DAG::DAG(Domain domain, const std::vector<std::pair<int, int>>& edges)
    : domain_(std::move(domain)),
      parents_(static_cast<std::size_t>(domain_.size())),
      children_(static_cast<std::size_t>(domain_.size())) {
    const int n = domain_.size();
    for (auto [p, c] : edges) {
        check_node(p, n);
        check_node(c, n);
        if (p == c) throw ValidationError("self loop on node " + std::to_string(p));
        children_[static_cast<std::size_t>(p)] |= VarSet::single(c);
        parents_[static_cast<std::size_t>(c)] |= VarSet::single(p);
    }
    // Kahn's algorithm; smallest index first so the order is deterministic.
    std::vector<int> indegree(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) indegree[static_cast<std::size_t>(v)] = parents(v).size();
    VarSet ready;
    for (int v = 0; v < n; ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) ready |= VarSet::single(v);
    }
    while (!ready.empty()) {
        const int v = std::countr_zero(ready.bits());
        ready = ready - VarSet::single(v);
        topo_.push_back(v);
        children(v).for_each([&](int c) {
            if (--indegree[static_cast<std::size_t>(c)] == 0) ready |= VarSet::single(c);
        });
    }
    if (static_cast<int>(topo_.size()) != n) throw ValidationError("graph contains a directed cycle");
}

std::vector<std::pair<int, int>> DAG::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int p = 0; p < size(); ++p) {
        children(p).for_each([&](int c) { out.emplace_back(p, c); });
    }
    return out;
}

std::size_t DAG::edge_count() const {
    std::size_t n = 0;
    for (const auto& c : children_) n += static_cast<std::size_t>(c.size());
    return n;
}

VarSet DAG::descendants(VarSet s) const {
    VarSet seen = s;
    std::vector<int> stack = s.members();
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        (children(v) - seen).for_each([&](int c) { stack.push_back(c); });
        seen |= children(v);
    }
    return seen;
}

VarSet DAG::ancestors(VarSet s) const {
    VarSet seen = s;
    std::vector<int> stack = s.members();
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        (parents(v) - seen).for_each([&](int p) { stack.push_back(p); });
        seen |= parents(v);
    }
    return seen;
}

PDAG::PDAG(Domain domain)
    : domain_(std::move(domain)),
      out_(static_cast<std::size_t>(domain_.size())),
      in_(static_cast<std::size_t>(domain_.size())),
      und_(static_cast<std::size_t>(domain_.size())) {}

PDAG PDAG::complete(Domain domain) {
    PDAG g(std::move(domain));
    for (int a = 0; a < g.size(); ++a) {
        for (int b = a + 1; b < g.size(); ++b) g.add_undirected(a, b);
    }
    return g;
}

PDAG PDAG::from_dag(const DAG& dag) {
    PDAG g(dag.domain());
    for (auto [p, c] : dag.edges()) g.orient(p, c);
    return g;
}

void PDAG::remove(int a, int b) {
    check_node(a, size());
    check_node(b, size());
    const VarSet sa = VarSet::single(a), sb = VarSet::single(b);
    out_[idx(a)] = out_[idx(a)] - sb;
    in_[idx(a)] = in_[idx(a)] - sb;
    und_[idx(a)] = und_[idx(a)] - sb;
    out_[idx(b)] = out_[idx(b)] - sa;
    in_[idx(b)] = in_[idx(b)] - sa;
    und_[idx(b)] = und_[idx(b)] - sa;
}

void PDAG::add_undirected(int a, int b) {
    if (a == b) throw ValidationError("self loop on node " + std::to_string(a));
    remove(a, b);
    und_[idx(a)] |= VarSet::single(b);
    und_[idx(b)] |= VarSet::single(a);
}

void PDAG::orient(int a, int b) {
    if (a == b) throw ValidationError("self loop on node " + std::to_string(a));
    remove(a, b);
    out_[idx(a)] |= VarSet::single(b);
    in_[idx(b)] |= VarSet::single(a);
}

std::vector<std::pair<int, int>> PDAG::directed_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < size(); ++a) children(a).for_each([&](int b) { out.emplace_back(a, b); });
    return out;
}

std::vector<std::pair<int, int>> PDAG::undirected_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < size(); ++a) {
        und_[idx(a)].for_each([&](int b) {
            if (a < b) out.emplace_back(a, b);
        });
    }
    return out;
}

void SepsetTable::record(int a, int b, VarSet s) {
    if (s.contains(a) || s.contains(b)) throw ValidationError("separating set contains an endpoint");
    table_[{std::min(a, b), std::max(a, b)}] = s;
}

std::optional<VarSet> SepsetTable::get(int a, int b) const {
    auto it = table_.find({std::min(a, b), std::max(a, b)});
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

bool d_separated(const DAG& g, VarSet x, VarSet y, VarSet z) {
    if (x.empty() || y.empty()) throw ValidationError("d-separation needs non-empty endpoint sets");
    if (!x.disjoint(y) || !x.disjoint(z) || !y.disjoint(z)) {
        throw ValidationError("d-separation query with overlapping sets");
    }
    const VarSet all = VarSet::range(g.size());
    if (!(x | y | z).subset_of(all)) throw ValidationError("d-separation query outside the graph");

    // Colliders are open iff they are in z or have a descendant in z.
    const VarSet open_colliders = g.ancestors(z);
    // State: node reached travelling up (from a child) or down (from a parent).
    VarSet visited_up, visited_down;
    std::deque<std::pair<int, bool>> queue;
    x.for_each([&](int v) { queue.emplace_back(v, true); });
    while (!queue.empty()) {
        auto [v, up] = queue.front();
        queue.pop_front();
        VarSet& seen = up ? visited_up : visited_down;
        if (seen.contains(v)) continue;
        seen |= VarSet::single(v);
        const bool in_z = z.contains(v);
        if (!in_z && y.contains(v)) return false;
        if (up) {
            if (in_z) continue;
            g.parents(v).for_each([&](int p) { queue.emplace_back(p, true); });
            g.children(v).for_each([&](int c) { queue.emplace_back(c, false); });
        } else {
            if (!in_z) g.children(v).for_each([&](int c) { queue.emplace_back(c, false); });
            if (open_colliders.contains(v)) g.parents(v).for_each([&](int p) { queue.emplace_back(p, true); });
        }
    }
    return true;
}

std::vector<CIStatement> enumerate_dsep_statements(const DAG& g, int max_cond) {
    const int n = g.size();
    std::vector<CIStatement> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const VarSet rest = VarSet::range(n) - VarSet::single(i) - VarSet::single(j);
            const std::vector<int> pool = rest.members();
            for (int k = 0; k <= std::min<int>(max_cond, static_cast<int>(pool.size())); ++k) {
                // Lexicographic k-combinations of pool.
                std::vector<int> pick(static_cast<std::size_t>(k));
                for (int t = 0; t < k; ++t) pick[static_cast<std::size_t>(t)] = t;
                for (;;) {
                    VarSet zs;
                    for (int t : pick) zs |= VarSet::single(pool[static_cast<std::size_t>(t)]);
                    const VarSet xs = VarSet::single(i), ys = VarSet::single(j);
                    out.push_back(make_statement(xs, ys, zs, d_separated(g, xs, ys, zs)));
                    int t = k - 1;
                    while (t >= 0 && pick[static_cast<std::size_t>(t)] == static_cast<int>(pool.size()) - k + t) --t;
                    if (t < 0) break;
                    ++pick[static_cast<std::size_t>(t)];
                    for (int u = t + 1; u < k; ++u) {
                        pick[static_cast<std::size_t>(u)] = pick[static_cast<std::size_t>(u - 1)] + 1;
                    }
                }
            }
        }
    }
    return out;
}

namespace {

// R1: a -> b - c, a and c nonadjacent  =>  b -> c
bool meek_r1(PDAG& g) {
    bool changed = false;
    for (int b = 0; b < g.size(); ++b) {
        g.undirected_neighbors(b).for_each([&](int c) {
            if (!g.is_undirected(b, c)) return;
            const VarSet sources = g.parents(b) - g.neighbors(c) - VarSet::single(c);
            if (!sources.empty()) {
                g.orient(b, c);
                changed = true;
            }
        });
    }
    return changed;
}

// R2: a -> c -> b and a - b  =>  a -> b
bool meek_r2(PDAG& g) {
    bool changed = false;
    for (int a = 0; a < g.size(); ++a) {
        g.undirected_neighbors(a).for_each([&](int b) {
            if (!g.is_undirected(a, b)) return;
            if (!(g.children(a) & g.parents(b)).empty()) {
                g.orient(a, b);
                changed = true;
            }
        });
    }
    return changed;
}

// R3: a - c, a - d, c -> b, d -> b, c and d nonadjacent, a - b  =>  a -> b
bool meek_r3(PDAG& g) {
    bool changed = false;
    for (int a = 0; a < g.size(); ++a) {
        g.undirected_neighbors(a).for_each([&](int b) {
            if (!g.is_undirected(a, b)) return;
            const std::vector<int> mids = (g.undirected_neighbors(a) & g.parents(b)).members();
            for (std::size_t i = 0; i < mids.size(); ++i) {
                for (std::size_t j = i + 1; j < mids.size(); ++j) {
                    if (!g.adjacent(mids[i], mids[j])) {
                        g.orient(a, b);
                        changed = true;
                        return;
                    }
                }
            }
        });
    }
    return changed;
}

// R4: a - b, a - d, d -> c -> b, a adjacent to c, b and d nonadjacent  =>  a -> b
bool meek_r4(PDAG& g) {
    bool changed = false;
    for (int a = 0; a < g.size(); ++a) {
        g.undirected_neighbors(a).for_each([&](int b) {
            if (!g.is_undirected(a, b)) return;
            const VarSet cs = g.parents(b) & g.neighbors(a);
            bool fire = false;
            cs.for_each([&](int c) {
                const VarSet ds = g.parents(c) & g.undirected_neighbors(a);
                ds.for_each([&](int d) {
                    if (d != b && !g.adjacent(b, d)) fire = true;
                });
            });
            if (fire) {
                g.orient(a, b);
                changed = true;
            }
        });
    }
    return changed;
}

}  // namespace

void apply_meek_rules(PDAG& g, bool with_r4) {
    for (;;) {
        bool changed = meek_r1(g);
        changed = meek_r2(g) || changed;
        changed = meek_r3(g) || changed;
        if (with_r4) changed = meek_r4(g) || changed;
        if (!changed) return;
    }
}

Orientation orient_cpdag(const PDAG& skeleton, const SepsetTable& sepsets, OrientOptions options) {
    if (!skeleton.directed_edges().empty()) throw ValidationError("skeleton must be fully undirected");
    Orientation result{skeleton, 0};
    PDAG& g = result.graph;
    const int n = skeleton.size();
    for (int mid = 0; mid < n; ++mid) {
        const std::vector<int> nbrs = skeleton.neighbors(mid).members();
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
                const int a = nbrs[i], b = nbrs[j];
                if (skeleton.adjacent(a, b)) continue;
                const VarSet sep = sepsets.get(a, b).value_or(VarSet{});
                if (sep.contains(mid)) continue;
                for (int end : {a, b}) {
                    if (g.is_directed(mid, end)) ++result.conflicts;
                    g.orient(end, mid);
                }
            }
        }
    }
    apply_meek_rules(g, options.meek_r4);
    return result;
}

int shd(const PDAG& a, const PDAG& b) {
    if (a.size() != b.size()) throw ValidationError("SHD of graphs with different node counts");
    auto mark = [](const PDAG& g, int i, int j) {
        if (g.is_undirected(i, j)) return 1;
        if (g.is_directed(i, j)) return 2;
        if (g.is_directed(j, i)) return 3;
        return 0;
    };
    int d = 0;
    for (int i = 0; i < a.size(); ++i) {
        for (int j = i + 1; j < a.size(); ++j) d += mark(a, i, j) != mark(b, i, j) ? 1 : 0;
    }
    return d;
}

DAG sample_er_dag(int n, double edge_prob, std::uint64_t seed) {
    if (n < 0 || n > kMaxVariables) throw ValidationError("node count out of range");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ValidationError("edge probability outside [0,1]");
    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.bernoulli(edge_prob)) {
                edges.emplace_back(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            }
        }
    }
    return DAG(n, edges);
}

PDAG cpdag_of(const DAG& dag) {
    PDAG g(dag.domain());
    for (auto [p, c] : dag.edges()) g.add_undirected(p, c);
    for (int c = 0; c < dag.size(); ++c) {
        const std::vector<int> ps = dag.parents(c).members();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                if (!dag.adjacent(ps[i], ps[j])) {
                    g.orient(ps[i], c);
                    g.orient(ps[j], c);
                }
            }
        }
    }
    apply_meek_rules(g);
    return g;
}

namespace {

ordered_json graph_header(const Domain& d) {
    ordered_json j;
    j["n"] = d.size();
    j["names"] = d.names();
    return j;
}

ordered_json edge_list(const std::vector<std::pair<int, int>>& edges) {
    ordered_json arr = ordered_json::array();
    for (auto [a, b] : edges) arr.push_back({a, b});
    return arr;
}

std::vector<std::pair<int, int>> parse_edges(const nlohmann::json& j, const char* field, int n) {
    std::vector<std::pair<int, int>> out;
    if (!j.contains(field)) return out;
    const auto& arr = j.at(field);
    if (!arr.is_array()) throw ValidationError(std::string("'") + field + "' must be an array");
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw ValidationError(std::string("malformed entry in '") + field + "'");
        }
        const int a = e[0].get<int>(), b = e[1].get<int>();
        check_node(a, n);
        check_node(b, n);
        out.emplace_back(a, b);
    }
    return out;
}

Domain parse_header(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("graph JSON must be an object");
    const int n = j.at("n").get<int>();
    if (n < 0 || n > kMaxVariables) throw ValidationError("node count out of range");
    if (!j.contains("names")) return Domain::anonymous(n);
    auto names = j.at("names").get<std::vector<std::string>>();
    if (static_cast<int>(names.size()) != n) throw ValidationError("'names' length differs from 'n'");
    return Domain(std::move(names));
}

}  // namespace

std::string dag_to_json(const DAG& g) {
    ordered_json j = graph_header(g.domain());
    j["edges"] = edge_list(g.edges());
    return j.dump();
}

DAG dag_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Domain d = parse_header(j);
    auto edges = parse_edges(j, "edges", d.size());
    return DAG(std::move(d), edges);
}

std::string pdag_to_json(const PDAG& g) {
    ordered_json j = graph_header(g.domain());
    j["edges"] = edge_list(g.directed_edges());
    j["undirected"] = edge_list(g.undirected_edges());
    return j.dump();
}

PDAG pdag_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    PDAG g(parse_header(j));
    for (auto [a, b] : parse_edges(j, "edges", g.size())) {
        if (g.adjacent(a, b)) throw ValidationError("pair listed twice in PDAG");
        g.orient(a, b);
    }
    for (auto [a, b] : parse_edges(j, "undirected", g.size())) {
        if (g.adjacent(a, b)) throw ValidationError("pair listed twice in PDAG");
        g.add_undirected(a, b);
    }
    return g;
}

}  // namespace cicheck
