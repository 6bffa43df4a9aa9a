#include "cicheck/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cicheck/random.hpp"

namespace cicheck {

GeneratedProblem generate_problem(int n, double edge_prob, double dirichlet_alpha, std::size_t m,
                                  std::uint64_t seed, int cardinality) {
    if (n < 1 || n > kMaxVariables) throw ValidationError("node count out of range");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ValidationError("edge probability outside [0,1]");
    if (!(dirichlet_alpha > 0.0)) throw ValidationError("Dirichlet concentration must be positive");
    if (m < 1) throw ValidationError("sample count must be at least 1");
    if (cardinality < 2) throw ValidationError("cardinality must be at least 2");
    Rng seeds(seed);
    const std::uint64_t graph_seed = seeds.next();
    const std::uint64_t cpt_seed = seeds.next();
    const std::uint64_t sample_seed = seeds.next();
    DAG dag = sample_er_dag(n, edge_prob, graph_seed);
    DiscreteBayesNet net = sample_cpts(dag, std::vector<int>(static_cast<std::size_t>(n), cardinality),
                                       dirichlet_alpha, cpt_seed);
    Dataset data = forward_sample(net, m, sample_seed);
    return {std::move(dag), std::move(net), std::move(data)};
}

InjectionSpec InjectionSpec::parse(const std::string& text) {
    InjectionSpec spec;
    if (text.empty() || text == "none") return spec;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ValidationError("injection spec must be rate=R or indices=i,j,...");
    const std::string key = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);
    if (key == "rate") {
        std::size_t used = 0;
        double r = 0.0;
        try {
            r = std::stod(value, &used);
        } catch (const std::exception&) {
            throw ValidationError("bad injection rate: " + value);
        }
        if (used != value.size() || !(r >= 0.0 && r <= 100.0)) throw ValidationError("bad injection rate: " + value);
        spec.rate = r;
    } else if (key == "indices") {
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t used = 0;
            int k = 0;
            try {
                k = std::stoi(item, &used);
            } catch (const std::exception&) {
                throw ValidationError("bad injection index: " + item);
            }
            if (used != item.size() || k < 1) throw ValidationError("bad injection index: " + item);
            spec.indices.insert(k);
        }
        if (spec.indices.empty()) throw ValidationError("no injection indices given");
    } else {
        throw ValidationError("unknown injection kind: " + key);
    }
    return spec;
}

std::string InjectionSpec::to_string() const {
    if (rate) {
        std::ostringstream out;
        out << "rate=" << *rate;
        return out.str();
    }
    if (indices.empty()) return "none";
    std::string out = "indices=";
    bool first = true;
    for (int k : indices) {
        if (!first) out += ",";
        out += std::to_string(k);
        first = false;
    }
    return out;
}

PcExperiment run_pc_experiment(const Domain& vars, const BackendFactory& backend, const CheckerOptions& checker,
                               const InjectionSpec& inject, std::uint64_t seed, const PcConfig& pc) {
    PcExperiment ex;
    {
        Checker clean({}, backend());
        ex.clean_tests = run_pc(vars, clean, pc).tests;
    }
    if (inject.rate) {
        ex.flips = flip_indices_for_rate(ex.clean_tests, *inject.rate, seed);
    } else {
        ex.flips = inject.indices;
    }
    std::shared_ptr<CITest> b = backend();
    if (!ex.flips.empty()) b = inject_errors(std::move(b), ex.flips);
    Checker run(checker, std::move(b));
    ex.report = run_pc(vars, run, pc);

    if (!ex.flips.empty()) ex.first_injection = *ex.flips.begin();
    for (const auto& rec : ex.report.log) {
        if (rec.alarm || rec.action == CheckAction::Aborted) {
            ex.first_alarm = rec.index;
            break;
        }
    }
    if (ex.first_injection && ex.first_alarm && ex.clean_tests > 0) {
        const double gap = static_cast<double>(*ex.first_alarm - *ex.first_injection) / ex.clean_tests;
        ex.detection_position = std::clamp(gap, 0.0, 1.0);
    }
    return ex;
}

std::vector<CIStatement> oracle_log(const DAG& g, int max_order) {
    Checker c({}, std::make_shared<OracleTest>(g));
    PcConfig cfg;
    cfg.max_order = max_order;
    const PcRunReport r = run_pc(g.domain(), c, cfg);
    std::vector<CIStatement> out;
    out.reserve(r.log.size());
    for (const auto& rec : r.log) out.push_back(canonicalize(rec.result.statement));
    return out;
}

std::vector<CIStatement> corrupt_statements(const std::vector<CIStatement>& sigma, double rate_percent,
                                            std::uint64_t seed, std::vector<std::size_t>* flipped) {
    std::vector<CIStatement> out = sigma;
    if (sigma.empty()) return out;
    const std::set<int> picks = flip_indices_for_rate(static_cast<int>(sigma.size()), rate_percent, seed);
    for (int k : picks) {
        const auto i = static_cast<std::size_t>(k - 1);
        out[i] = negate(out[i]);
        if (flipped) flipped->push_back(i);
    }
    return out;
}

BenchConfig bench_config(const std::string& name, const DecideConfig& base) {
    BenchConfig c{name, base};
    auto& d = c.decide;
    d.o1 = d.o2 = d.witness = d.o3 = d.full = false;
    if (name == "o1") {
        d.o1 = true;
    } else if (name == "o2") {
        d.o2 = true;
    } else if (name == "o3") {
        d.o3 = true;
    } else if (name == "full") {
        d.full = true;
    } else if (name == "witness") {
        d.witness = true;
    } else if (name == "o2+o3+full") {
        d.o2 = d.o3 = d.full = true;
    } else if (name == "all") {
        d.o1 = d.o2 = d.witness = d.o3 = d.full = true;
    } else {
        throw ValidationError("unknown bench configuration: " + name);
    }
    return c;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

BenchReport run_bench(const std::vector<BenchInstance>& instances, const std::vector<BenchConfig>& configs,
                      int workers) {
    BenchReport r;
    r.instances = instances;
    for (const auto& c : configs) r.configs.push_back(c.name);
    r.cells.assign(instances.size(), std::vector<BenchCell>(configs.size()));

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr error;
    const auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= instances.size()) return;
            try {
                const CirInstance inst = CirInstance::make(instances[i].statements);
                for (std::size_t c = 0; c < configs.size(); ++c) {
                    const Decision d = CirEngine(configs[c].decide).decide(inst);
                    BenchCell& cell = r.cells[i][c];
                    cell.verdict = d.verdict;
                    cell.stage = d.trace.concluded_by ? std::string(to_string(*d.trace.concluded_by)) : "none";
                    cell.ms = d.trace.total_ms;
                    cell.unknown = d.trace.unknown_as_consistent;
                }
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!error) error = std::current_exception();
                next = instances.size();
                return;
            }
        }
    };
    const int width = std::max(1, std::min<int>(workers, static_cast<int>(instances.size())));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < width; ++t) pool.emplace_back(work);
        work();
    }
    if (error) std::rethrow_exception(error);

    for (std::size_t c = 0; c < configs.size(); ++c) {
        BenchSummary s;
        s.config = configs[c].name;
        std::vector<double> times;
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const BenchCell& cell = r.cells[i][c];
            ++s.total;
            if (cell.verdict == Verdict::Inconsistent) ++s.refuted;
            times.push_back(cell.ms);
        }
        if (!times.empty()) {
            double sum = 0.0;
            for (double t : times) sum += t;
            s.mean_ms = sum / static_cast<double>(times.size());
            s.median_ms = median(times);
            s.max_ms = *std::max_element(times.begin(), times.end());
        }
        r.summary.push_back(s);
    }
    return r;
}

std::string bench_report_to_json(const BenchReport& r, const Domain& domain, bool include_timing) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["configs"] = r.configs;
    ordered_json insts = ordered_json::array();
    for (std::size_t i = 0; i < r.instances.size(); ++i) {
        const auto& in = r.instances[i];
        ordered_json e;
        e["index"] = i;
        e["source"] = in.source;
        e["statements"] = in.statements.size();
        ordered_json flips = ordered_json::array();
        for (std::size_t f : in.flipped) flips.push_back(ordered_json::parse(statement_to_json(domain, in.statements[f])));
        e["flipped"] = flips;
        ordered_json results = ordered_json::object();
        for (std::size_t c = 0; c < r.configs.size(); ++c) {
            const BenchCell& cell = r.cells[i][c];
            ordered_json cj;
            cj["verdict"] = std::string(to_string(cell.verdict));
            cj["stage"] = cell.stage;
            cj["unknown"] = cell.unknown;
            if (include_timing) cj["ms"] = cell.ms;
            results[r.configs[c]] = cj;
        }
        e["results"] = results;
        insts.push_back(e);
    }
    j["instances"] = insts;
    ordered_json summary = ordered_json::array();
    for (const auto& s : r.summary) {
        ordered_json sj;
        sj["config"] = s.config;
        sj["refuted"] = s.refuted;
        sj["total"] = s.total;
        if (include_timing) {
            sj["mean_ms"] = s.mean_ms;
            sj["median_ms"] = s.median_ms;
            sj["max_ms"] = s.max_ms;
        }
        summary.push_back(sj);
    }
    j["summary"] = summary;
    return j.dump(2);
}

}  // namespace cicheck
