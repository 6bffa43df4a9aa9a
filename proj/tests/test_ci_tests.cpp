#include <doctest.h>

#include <nlohmann/json.hpp>

#include "cicheck/ci_tests.hpp"
#include "cicheck/random.hpp"

using namespace cicheck;

namespace {

VarSet S(int i) { return VarSet::single(i); }

// x, y independent fair coins; z = x for the "copy" column.
std::shared_ptr<Dataset> coin_data(std::size_t m, std::uint64_t seed) {
    auto d = std::make_shared<Dataset>();
    d->names = {"X", "Y", "Z"};
    Rng rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const int x = rng.bernoulli(0.5), y = rng.bernoulli(0.5);
        d->rows.push_back({x, y, x});
    }
    return d;
}

}  // namespace

TEST_CASE("chi-squared upper tail reference values") {
    CHECK(chi2_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_upper_tail(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_upper_tail(0.0, 3) == 1.0);
    CHECK(chi2_upper_tail(10.0, 0) == 1.0);
}

TEST_CASE("chi-squared on independent and copied columns") {
    const auto d = coin_data(5000, 1);
    const auto indep = chi2_test(*d, {S(0), S(1), {}, 0});
    REQUIRE(indep.p_value.has_value());
    CHECK(indep.df == 1);
    CHECK(indep.source == ResultSource::Chi2);
    const auto copy = chi2_test(*d, {S(0), S(2), {}, 0});
    CHECK_FALSE(copy.statement.independent);
    CHECK(*copy.p_value < 1e-12);
    // conditioning on the copy makes x constant in every stratum: no degrees of freedom
    const auto cond = chi2_test(*d, {S(1), S(2), S(0), 0});
    CHECK(cond.df == 0);
    CHECK(cond.statement.independent);
}

TEST_CASE("strata below the minimum count are skipped") {
    Dataset d;
    d.names = {"X", "Y"};
    for (int i = 0; i < 4; ++i) d.rows.push_back({i % 2, i % 2});
    const auto r = chi2_test(d, {S(0), S(1), {}, 0});
    CHECK(r.low_support);
    CHECK(r.statement.independent);
    CHECK_FALSE(r.p_value.has_value());
}

TEST_CASE("chi-squared rejects set-valued or out-of-range queries") {
    const auto d = coin_data(50, 2);
    CHECK_THROWS_AS(chi2_test(*d, {S(0) | S(1), S(2), {}, 0}), ValidationError);
    CHECK_THROWS_AS(chi2_test(*d, {S(0), S(4), {}, 0}), ValidationError);
}

TEST_CASE("oracle backend answers by d-separation") {
    OracleTest t(DAG(3, {{0, 2}, {1, 2}}));
    CHECK(t.test({S(0), S(1), {}, 1}).statement.independent);
    CHECK_FALSE(t.test({S(0), S(1), S(2), 2}).statement.independent);
    CHECK_FALSE(t.test({S(1), S(0), S(2), 2}).p_value.has_value());
}

TEST_CASE("error injection flips exactly the listed tests") {
    auto oracle = std::make_shared<OracleTest>(DAG(3, {{0, 2}, {1, 2}}));
    ErrorInjector inj(oracle, {2});
    const CIQuery q{S(0), S(1), {}, 0};
    const auto r1 = inj.test(q);
    const auto r2 = inj.test(q);
    const auto r3 = inj.test(q);
    CHECK(r1.statement.independent);
    CHECK_FALSE(r2.statement.independent);
    CHECK(r2.source == ResultSource::Injected);
    CHECK(r3.statement.independent);
    CHECK(inj.issued() == 3);
    CHECK_THROWS_AS(ErrorInjector(oracle, {0}), ValidationError);
}

TEST_CASE("flip index sampling") {
    const auto f = flip_indices_for_rate(100, 5.0, 7);
    CHECK(f.size() == 5);
    CHECK(f == flip_indices_for_rate(100, 5.0, 7));
    for (int k : f) CHECK((k >= 1 && k <= 100));
    CHECK(flip_indices_for_rate(10, 5.0, 1).size() == 1);  // at least one
    CHECK(flip_indices_for_rate(0, 5.0, 1).empty());
    CHECK(flip_indices_for_rate(40, 100.0, 1).size() == 40);
    CHECK_THROWS_AS(flip_indices_for_rate(10, 120.0, 1), ValidationError);
}

TEST_CASE("test log line format") {
    const Domain d({"X", "Y", "Z"});
    CITestResult r;
    r.statement = make_statement(S(0), S(1), S(2), true);
    r.p_value = 0.25;
    r.source = ResultSource::Chi2;
    CHECK(test_log_record(d, 3, r) ==
          R"({"index":3,"x":["X"],"y":["Y"],"z":["Z"],"independent":true,"p_value":0.25,"source":"chi2"})");
    r.p_value.reset();
    r.source = ResultSource::Entailed;
    const auto j = nlohmann::json::parse(test_log_record(d, 4, r));
    CHECK(j["p_value"].is_null());
    CHECK(j["source"] == "entailed");
}
