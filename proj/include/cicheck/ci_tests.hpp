#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cicheck/bayes_net.hpp"
#include "cicheck/core_model.hpp"
#include "cicheck/graph.hpp"

namespace cicheck {

struct CIQuery {
    VarSet x;
    VarSet y;
    VarSet z;
    /// 1-based count of tests issued so far, including this one; 0 when unknown.
    int sequence_index = 0;
};

enum class ResultSource { Oracle, Chi2, Injected, Entailed };

std::string_view to_string(ResultSource s);

struct CITestResult {
    CIStatement statement;
    std::optional<double> p_value;
    std::optional<double> statistic;
    std::optional<int> df;
    ResultSource source = ResultSource::Oracle;
    /// Every stratum was too small to test.
    bool low_support = false;
};

/// A conditional-independence test backend.
class CITest {
public:
    virtual ~CITest() = default;
    virtual CITestResult test(const CIQuery& q) = 0;
};

/// Perfect oracle answering by d-separation in the true graph.
class OracleTest final : public CITest {
public:
    explicit OracleTest(DAG g) : graph_(std::move(g)) {}
    CITestResult test(const CIQuery& q) override;

private:
    DAG graph_;
};

inline constexpr double kDefaultAlpha = 0.05;
/// Strata with fewer samples are skipped.
inline constexpr std::size_t kMinStratumCount = 5;

/// Pearson chi-squared test summed over the strata of z.
CITestResult chi2_test(const Dataset& data, const CIQuery& q, double alpha = kDefaultAlpha);

/// Upper tail P(X >= statistic) of a chi-squared distribution with `df` degrees of freedom.
double chi2_upper_tail(double statistic, int df);

class Chi2Test final : public CITest {
public:
    Chi2Test(std::shared_ptr<const Dataset> data, double alpha = kDefaultAlpha)
        : data_(std::move(data)), alpha_(alpha) {}
    CITestResult test(const CIQuery& q) override { return chi2_test(*data_, q, alpha_); }

private:
    std::shared_ptr<const Dataset> data_;
    double alpha_;
};

/// Negates the answer of the k-th issued test for every k in `flip_indices`.
class ErrorInjector final : public CITest {
public:
    ErrorInjector(std::shared_ptr<CITest> inner, std::set<int> flip_indices);
    CITestResult test(const CIQuery& q) override;
    int issued() const { return issued_; }
    const std::set<int>& flip_indices() const { return flips_; }

private:
    std::shared_ptr<CITest> inner_;
    std::set<int> flips_;
    int issued_ = 0;
};

std::shared_ptr<CITest> inject_errors(std::shared_ptr<CITest> backend, std::set<int> flip_indices);

/// max(1, floor(total * rate_percent / 100)) distinct indices in 1..total, drawn without replacement.
std::set<int> flip_indices_for_rate(int total_tests, double rate_percent, std::uint64_t seed);

/// One test-log line: {"index","x","y","z","independent","p_value","source"}.
std::string test_log_record(const Domain& domain, int index, const CITestResult& r);

}  // namespace cicheck
