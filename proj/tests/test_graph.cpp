#include <doctest.h>

#include "cicheck/graph.hpp"
#include "cicheck/random.hpp"
#include "test_util.hpp"

using namespace cicheck;

namespace {
VarSet S(int i) { return VarSet::single(i); }
}

TEST_CASE("dag construction and queries") {
    const DAG g(Domain({"A", "B", "C", "D"}), {{0, 1}, {1, 2}, {0, 3}});
    CHECK(g.parents(2) == S(1));
    CHECK(g.children(0) == (S(1) | S(3)));
    CHECK(g.adjacent(2, 1));
    CHECK_FALSE(g.adjacent(2, 3));
    CHECK(g.edge_count() == 3);
    CHECK(g.descendants(S(0)) == (S(0) | S(1) | S(2) | S(3)));
    CHECK(g.ancestors(S(2)) == (S(0) | S(1) | S(2)));
    const auto& topo = g.topological_order();
    REQUIRE(topo.size() == 4);
    CHECK(topo.front() == 0);
}

TEST_CASE("dag rejects cycles, self loops and bad indices") {
    CHECK_THROWS_AS(DAG(3, {{0, 1}, {1, 2}, {2, 0}}), ValidationError);
    CHECK_THROWS_AS(DAG(2, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(DAG(2, {{0, 2}}), ValidationError);
}

TEST_CASE("d-separation on the three canonical shapes") {
    const DAG chain(3, {{0, 1}, {1, 2}});
    CHECK_FALSE(d_separated(chain, S(0), S(2), {}));
    CHECK(d_separated(chain, S(0), S(2), S(1)));
    const DAG fork(3, {{1, 0}, {1, 2}});
    CHECK_FALSE(d_separated(fork, S(0), S(2), {}));
    CHECK(d_separated(fork, S(0), S(2), S(1)));
    const DAG collider(3, {{0, 1}, {2, 1}});
    CHECK(d_separated(collider, S(0), S(2), {}));
    CHECK_FALSE(d_separated(collider, S(0), S(2), S(1)));
    // conditioning on a descendant of the collider also opens it
    const DAG with_child(4, {{0, 1}, {2, 1}, {1, 3}});
    CHECK_FALSE(d_separated(with_child, S(0), S(2), S(3)));
}

TEST_CASE("d-separation rejects invalid queries") {
    const DAG g(3, {{0, 1}});
    CHECK_THROWS_AS(d_separated(g, {}, S(1), {}), ValidationError);
    CHECK_THROWS_AS(d_separated(g, S(0), S(0), {}), ValidationError);
    CHECK_THROWS_AS(d_separated(g, S(0), S(5), {}), ValidationError);
}

TEST_CASE("d-separation agrees with path enumeration on random graphs") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const int n = 3 + static_cast<int>(seed % 3);
        const DAG g = sample_er_dag(n, 0.5, seed);
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        for (std::uint64_t x = 1; x <= full; ++x) {
            for (std::uint64_t y = 1; y <= full; ++y) {
                if (x & y) continue;
                const std::uint64_t rest = full & ~(x | y);
                for (std::uint64_t z = rest;; z = (z - 1) & rest) {
                    CHECK(d_separated(g, VarSet(x), VarSet(y), VarSet(z)) ==
                          testing::brute_force_d_separated(g, VarSet(x), VarSet(y), VarSet(z)));
                    if (z == 0) break;
                }
            }
        }
    }
}

TEST_CASE("d-separation statement enumeration order") {
    const DAG g(3, {{0, 1}, {1, 2}});
    const auto st = enumerate_dsep_statements(g, 1);
    REQUIRE(st.size() == 6);
    CHECK(st[0] == make_statement(S(0), S(1), {}, false));
    CHECK(st[1] == make_statement(S(0), S(1), S(2), false));
    CHECK(st[2] == make_statement(S(0), S(2), {}, false));
    CHECK(st[3] == make_statement(S(0), S(2), S(1), true));
    CHECK(st[4].x == S(1));
    CHECK(enumerate_dsep_statements(g, 0).size() == 3);
}

TEST_CASE("pdag edits") {
    PDAG g(3);
    g.add_undirected(0, 1);
    CHECK(g.is_undirected(1, 0));
    g.orient(1, 0);
    CHECK(g.is_directed(1, 0));
    CHECK_FALSE(g.is_undirected(0, 1));
    CHECK(g.parents(0) == S(1));
    g.remove(0, 1);
    CHECK_FALSE(g.adjacent(0, 1));
    const PDAG k = PDAG::complete(Domain::anonymous(4));
    CHECK(k.undirected_edges().size() == 6);
}

TEST_CASE("sepset table") {
    SepsetTable t;
    t.record(2, 0, S(1));
    CHECK(t.get(0, 2) == S(1));
    CHECK_FALSE(t.get(0, 1).has_value());
    CHECK_THROWS_AS(t.record(0, 1, S(0)), ValidationError);
}

TEST_CASE("collider orientation from sepsets") {
    PDAG sk(3);
    sk.add_undirected(0, 2);
    sk.add_undirected(1, 2);
    SepsetTable seps;
    seps.record(0, 1, {});
    const Orientation o = orient_cpdag(sk, seps);
    CHECK(o.graph.is_directed(0, 2));
    CHECK(o.graph.is_directed(1, 2));
    CHECK(o.conflicts == 0);

    SepsetTable chain_seps;
    chain_seps.record(0, 1, S(2));
    const Orientation c = orient_cpdag(sk, chain_seps);
    CHECK(c.graph.is_undirected(0, 2));
    CHECK(c.graph.is_undirected(1, 2));
}

TEST_CASE("meek rule 1") {
    PDAG g(3);
    g.add_undirected(0, 1);
    g.add_undirected(1, 2);
    g.orient(0, 1);
    apply_meek_rules(g);
    CHECK(g.is_directed(1, 2));
}

TEST_CASE("meek rule 2") {
    PDAG g(3);
    g.add_undirected(0, 2);
    g.add_undirected(2, 1);
    g.add_undirected(0, 1);
    g.orient(0, 2);
    g.orient(2, 1);
    apply_meek_rules(g);
    CHECK(g.is_directed(0, 1));
}

TEST_CASE("meek rule 3") {
    // a=0, b=1, c=2, d=3
    PDAG g(4);
    for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 2}, {0, 3}, {0, 1}, {2, 1}, {3, 1}}) g.add_undirected(u, v);
    g.orient(2, 1);
    g.orient(3, 1);
    apply_meek_rules(g);
    CHECK(g.is_directed(0, 1));
    CHECK(g.is_undirected(0, 2));
}

TEST_CASE("meek rule 4 only when enabled") {
    // a=0, b=1, c=2, d=3: a-b, a-d, a-c, d->c->b, b and d nonadjacent
    PDAG g(4);
    for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {0, 2}, {3, 2}, {2, 1}}) g.add_undirected(u, v);
    g.orient(3, 2);
    g.orient(2, 1);
    PDAG without = g;
    apply_meek_rules(without, false);
    apply_meek_rules(g, true);
    CHECK(without.is_undirected(0, 1));
    CHECK(g.is_directed(0, 1));
}

TEST_CASE("structural hamming distance") {
    const PDAG a = PDAG::from_dag(DAG(3, {{0, 1}, {1, 2}}));
    CHECK(shd(a, a) == 0);
    CHECK(shd(a, PDAG::from_dag(DAG(3, {{1, 0}, {1, 2}}))) == 1);
    CHECK(shd(a, PDAG::from_dag(DAG(3, {{0, 1}}))) == 1);
    PDAG u(3);
    u.add_undirected(0, 1);
    u.add_undirected(1, 2);
    CHECK(shd(a, u) == 2);
    CHECK(shd(a, PDAG(3)) == 2);
}

TEST_CASE("cpdag of chain and collider") {
    const PDAG chain = cpdag_of(DAG(3, {{0, 1}, {1, 2}}));
    CHECK(chain.undirected_edges().size() == 2);
    const PDAG coll = cpdag_of(DAG(4, {{0, 2}, {1, 2}, {2, 3}}));
    CHECK(coll.is_directed(0, 2));
    CHECK(coll.is_directed(1, 2));
    CHECK(coll.is_directed(2, 3));  // by R1
}

TEST_CASE("erdos-renyi sampling") {
    CHECK(sample_er_dag(6, 0.3, 9) == sample_er_dag(6, 0.3, 9));
    CHECK(sample_er_dag(5, 0.0, 1).edge_count() == 0);
    CHECK(sample_er_dag(5, 1.0, 1).edge_count() == 10);
    CHECK_THROWS_AS(sample_er_dag(5, 1.5, 1), ValidationError);
    double total = 0;
    for (std::uint64_t s = 0; s < 200; ++s) total += static_cast<double>(sample_er_dag(6, 0.4, s).edge_count());
    CHECK(total / 200.0 == doctest::Approx(6.0).epsilon(0.1));  // 15 pairs * 0.4
}

TEST_CASE("graph json round trip") {
    const DAG g(Domain({"A", "B", "C"}), {{0, 1}, {2, 1}});
    CHECK(dag_from_json(dag_to_json(g)) == g);
    PDAG p(Domain({"A", "B", "C"}));
    p.add_undirected(0, 1);
    p.add_undirected(1, 2);
    p.orient(2, 1);
    CHECK(pdag_from_json(pdag_to_json(p)) == p);
    CHECK_THROWS(dag_from_json("{\"n\":2,\"names\":[\"A\",\"B\"],\"edges\":[[0,1],[1,0]]}"));
}
