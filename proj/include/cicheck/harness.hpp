#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cicheck/bayes_net.hpp"
#include "cicheck/checkers.hpp"
#include "cicheck/cir_engine.hpp"
#include "cicheck/pc_runner.hpp"

namespace cicheck {

inline constexpr double kDefaultEdgeProb = 0.4;

struct GeneratedProblem {
    DAG dag;
    DiscreteBayesNet net;
    Dataset data;
};

/// ER graph, Dirichlet CPTs and forward samples, all derived from one seed.
GeneratedProblem generate_problem(int n, double edge_prob, double dirichlet_alpha, std::size_t m,
                                  std::uint64_t seed, int cardinality = 2);

/// `rate=R` (percent of the tests of a clean run) or `indices=i,j,...` (1-based).
struct InjectionSpec {
    std::optional<double> rate;
    std::set<int> indices;

    bool active() const { return rate.has_value() || !indices.empty(); }
    static InjectionSpec parse(const std::string& text);
    std::string to_string() const;
};

struct PcExperiment {
    PcRunReport report;
    /// Tests issued by the uncorrupted run; the denominator for detection positions.
    int clean_tests = 0;
    std::set<int> flips;
    std::optional<int> first_injection;
    /// Index of the first alarm or abort, if any.
    std::optional<int> first_alarm;
    /// (first_alarm - first_injection) / clean_tests, clamped to [0, 1].
    std::optional<double> detection_position;
};

using BackendFactory = std::function<std::shared_ptr<CITest>()>;

/// Runs PC with the given checker on a fresh backend, corrupting test answers per `inject`.
/// Rate-based injection first runs PC without checker or injection to count the tests.
PcExperiment run_pc_experiment(const Domain& vars, const BackendFactory& backend, const CheckerOptions& checker,
                               const InjectionSpec& inject, std::uint64_t seed, const PcConfig& pc = {});

/// Statements produced by a PC run with the perfect oracle, in query order.
std::vector<CIStatement> oracle_log(const DAG& g, int max_order = -1);

/// Copy of Σ with max(1, floor(|Σ| rate / 100)) distinct statements negated. With canonical
/// statements a symmetric counterpart is the same entry, so each flip is counted once.
std::vector<CIStatement> corrupt_statements(const std::vector<CIStatement>& sigma, double rate_percent,
                                            std::uint64_t seed, std::vector<std::size_t>* flipped = nullptr);

struct BenchConfig {
    std::string name;
    DecideConfig decide;
};

/// o1, o2, o3, full, witness, o2+o3+full, all; the solver-free ones never touch the solver.
BenchConfig bench_config(const std::string& name, const DecideConfig& base = {});

struct BenchInstance {
    std::string source;
    std::vector<CIStatement> statements;
    std::vector<std::size_t> flipped;
};

struct BenchCell {
    Verdict verdict = Verdict::Consistent;
    std::string stage;  // concluding stage or "none"
    double ms = 0.0;
    bool unknown = false;
};

struct BenchSummary {
    std::string config;
    int refuted = 0;
    int total = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double max_ms = 0.0;
};

struct BenchReport {
    std::vector<BenchInstance> instances;
    std::vector<std::string> configs;
    /// cells[i][c]: instance i under config c.
    std::vector<std::vector<BenchCell>> cells;
    std::vector<BenchSummary> summary;
};

/// Decides every instance under every config; `workers` instances run at once.
BenchReport run_bench(const std::vector<BenchInstance>& instances, const std::vector<BenchConfig>& configs,
                      int workers = 1);

std::string bench_report_to_json(const BenchReport& r, const Domain& domain, bool include_timing = true);

double median(std::vector<double> v);

}  // namespace cicheck
