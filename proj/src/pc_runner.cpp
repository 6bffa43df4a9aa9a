#include "cicheck/pc_runner.hpp"

#include <chrono>

#include <nlohmann/json.hpp>

namespace cicheck {

namespace {

// Subsets of `pool` with exactly k members, in lexicographic order of their sorted members.
std::vector<VarSet> combinations(VarSet pool, int k) {
    const std::vector<int> items = pool.members();
    const int n = static_cast<int>(items.size());
    std::vector<VarSet> out;
    if (k < 0 || k > n) return out;
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    for (;;) {
        VarSet s;
        for (int i : pick) s |= VarSet::single(items[static_cast<std::size_t>(i)]);
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace

Skeleton learn_skeleton(const Domain& vars, Checker& provider, const PcConfig& config) {
    const int n = vars.size();
    const int max_order = config.max_order < 0 ? std::max(n - 2, 0) : config.max_order;
    if (n >= 2 && max_order > n - 2) throw ValidationError("max order exceeds n-2");

    Skeleton sk;
    sk.graph = PDAG::complete(vars);
    int index = 0;
    for (int order = 0; order <= max_order; ++order) {
        bool any_pair = false;
        sk.per_order.push_back(0);
        for (int x = 0; x < n; ++x) {
            for (int y = 0; y < n; ++y) {
                if (x == y || !sk.graph.adjacent(x, y)) continue;
                const VarSet adj = sk.graph.neighbors(x) - VarSet::single(y);
                if (adj.size() < order) continue;
                any_pair = true;
                for (VarSet s : combinations(adj, order)) {
                    CIQuery q{VarSet::single(x), VarSet::single(y), s, 0};
                    CheckOutcome out;
                    try {
                        out = provider.query(q);
                    } catch (const CheckAborted& e) {
                        PcQueryRecord rec{++index, order, e.result(), CheckAction::Aborted, true};
                        ++sk.per_order.back();
                        sk.log.push_back(rec);
                        sk.aborted = true;
                        sk.abort_query = index;
                        return sk;
                    }
                    ++sk.per_order.back();
                    sk.log.push_back({++index, order, out.result, out.action, out.alarm});
                    if (out.result.statement.independent) {
                        sk.graph.remove(x, y);
                        sk.sepsets.record(x, y, s);
                        break;
                    }
                }
            }
        }
        if (!any_pair) {
            sk.per_order.pop_back();
            break;
        }
    }
    return sk;
}

PcRunReport run_pc(const Domain& vars, Checker& provider, const PcConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    Skeleton sk = learn_skeleton(vars, provider, config);
    PcRunReport r;
    r.sepsets = sk.sepsets;
    r.aborted = sk.aborted;
    r.abort_query = sk.abort_query;
    r.per_order = sk.per_order;
    r.queries = static_cast<int>(sk.log.size());
    for (const auto& rec : sk.log) {
        if (rec.action == CheckAction::Entailed) {
            ++r.entailed;
        } else {
            ++r.tests;
        }
        if (rec.alarm) ++r.alarms;
    }
    if (sk.aborted) {
        r.pdag = std::move(sk.graph);
    } else {
        Orientation o = orient_cpdag(sk.graph, sk.sepsets, {config.meek_r4});
        r.pdag = std::move(o.graph);
        r.orientation_conflicts = o.conflicts;
    }
    r.log = std::move(sk.log);
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string pc_report_to_json(const PcRunReport& report, bool include_timing) {
    using nlohmann::ordered_json;
    const Domain& d = report.pdag.domain();
    ordered_json j;
    j["pdag"] = ordered_json::parse(pdag_to_json(report.pdag));
    ordered_json seps = ordered_json::array();
    for (const auto& [pair, s] : report.sepsets.entries()) {
        seps.push_back({{"x", d.name(pair.first)}, {"y", d.name(pair.second)}, {"sepset", d.names_of(s)}});
    }
    j["sepsets"] = seps;
    j["queries"] = report.queries;
    j["tests"] = report.tests;
    j["entailed"] = report.entailed;
    j["alarms"] = report.alarms;
    j["aborted"] = report.aborted;
    j["abort_query"] = report.abort_query ? ordered_json(*report.abort_query) : ordered_json(nullptr);
    j["per_order"] = report.per_order;
    j["orientation_conflicts"] = report.orientation_conflicts;
    if (include_timing) j["wall_ms"] = report.wall_ms;
    return j.dump(2);
}

}  // namespace cicheck
