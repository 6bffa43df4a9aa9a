#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cicheck/checkers.hpp"
#include "cicheck/graph.hpp"

namespace cicheck {

struct PcConfig {
    /// Largest conditioning-set size; -1 means n-2.
    int max_order = -1;
    bool meek_r4 = false;
};

struct PcQueryRecord {
    int index = 0;  // 1-based query position
    int order = 0;
    CITestResult result;
    CheckAction action = CheckAction::Tested;
    bool alarm = false;
};

struct Skeleton {
    PDAG graph;
    SepsetTable sepsets;
    std::vector<PcQueryRecord> log;
    /// Queries issued at each order.
    std::vector<int> per_order;
    bool aborted = false;
    std::optional<int> abort_query;
};

struct PcRunReport {
    PDAG pdag;
    SepsetTable sepsets;
    int queries = 0;
    int tests = 0;     // backend calls
    int entailed = 0;  // queries answered by P-Check without a backend call
    int alarms = 0;
    bool aborted = false;
    std::optional<int> abort_query;
    std::vector<int> per_order;
    int orientation_conflicts = 0;
    double wall_ms = 0.0;
    std::vector<PcQueryRecord> log;
};

/// Order-increasing edge removal starting from the complete graph. Pairs are visited in
/// lexicographic (x, y) order over ordered pairs and conditioning sets in lexicographic
/// combination order; adjacency is re-read after each deletion. A checker abort stops
/// the run and is reported through `aborted`.
Skeleton learn_skeleton(const Domain& vars, Checker& provider, const PcConfig& config = {});

/// Skeleton learning followed by collider orientation and Meek's rules.
PcRunReport run_pc(const Domain& vars, Checker& provider, const PcConfig& config = {});

/// Report JSON; `include_timing` false drops wall time so reports compare byte-for-byte.
std::string pc_report_to_json(const PcRunReport& report, bool include_timing = true);

}  // namespace cicheck
