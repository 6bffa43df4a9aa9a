// cicheck: consistency checking of CI statements and checked PC runs.
//
// Exit codes: 0 consistent / success, 1 inconsistent, 2 usage or input error,
// 3 run aborted by ED-Check.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cicheck/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace cicheck;

namespace {

constexpr int kExitConsistent = 0;
constexpr int kExitInconsistent = 1;
constexpr int kExitError = 2;
constexpr int kExitAborted = 3;

struct DecideFlags {
    bool no_o1 = false;
    bool no_o2 = false;
    bool no_o3 = false;
    bool no_witness = false;
    bool no_smt = false;
    std::string solver;
    int timeout_ms = 60000;
    std::size_t cap = kDefaultGraphoidCap;
    std::string axioms = "standard";

    void attach(CLI::App* app) {
        app->add_flag("--no-o1", no_o1, "Disable marginality analysis");
        app->add_flag("--no-o2", no_o2, "Disable graphoid saturation (and the witness search built on it)");
        app->add_flag("--no-o3", no_o3, "Disable overlap decomposition");
        app->add_flag("--no-witness", no_witness, "Disable the native witness search");
        app->add_flag("--no-smt", no_smt, "Do not solve the full SMT instance");
        app->add_option("--solver", solver, "SMT solver executable (default: $CICHECK_SOLVER, then z3)");
        app->add_option("--timeout-ms", timeout_ms, "Per-call solver timeout in milliseconds")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--cap", cap, "Graphoid closure size cap")->check(CLI::PositiveNumber);
        app->add_option("--axioms", axioms, "Axiom form")
            ->check(CLI::IsMember({"standard", "appendix-verbatim"}));
    }

    DecideConfig config() const {
        DecideConfig c;
        c.o1 = !no_o1;
        c.o2 = !no_o2;
        c.witness = !no_o2 && !no_witness;
        c.o3 = !no_o3;
        c.full = !no_smt;
        c.graphoid_cap = cap;
        c.timeout_ms = timeout_ms;
        c.form = axioms == "appendix-verbatim" ? AxiomForm::AppendixVerbatim : AxiomForm::Standard;
        if (!solver.empty()) c.solver = SolverConfig::resolve(solver);
        return c;
    }

    ordered_json spec() const {
        ordered_json j;
        j["no_o1"] = no_o1;
        j["no_o2"] = no_o2;
        j["no_o3"] = no_o3;
        j["no_witness"] = no_witness;
        j["no_smt"] = no_smt;
        j["solver"] = solver.empty() ? ordered_json(nullptr) : ordered_json(solver);
        j["timeout_ms"] = timeout_ms;
        j["cap"] = cap;
        j["axioms"] = axioms;
        return j;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
    } else {
        write_file(out_path, text + "\n");
    }
}

ordered_json trace_json(const DecisionTrace& t) {
    ordered_json j;
    ordered_json timings = ordered_json::object();
    ordered_json results = ordered_json::object();
    for (const auto& s : t.stages) {
        timings[std::string(to_string(s.stage))] = s.ms;
        results[std::string(to_string(s.stage))] = std::string(to_string(s.result));
    }
    j["stage_results"] = results;
    j["timings_ms"] = timings;
    j["total_ms"] = t.total_ms;
    j["subproblems"] = t.subproblems;
    j["solver_calls"] = t.solver_calls;
    j["full_status"] = t.full_status ? ordered_json(std::string(to_string(*t.full_status))) : ordered_json(nullptr);
    j["unknown_as_consistent"] = t.unknown_as_consistent;
    return j;
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
    std::string input;
    DecideFlags decide;
};

int cmd_check(const CheckArgs& a) {
    Domain domain;
    std::vector<CIStatement> statements;
    {
        std::ifstream in(a.input);
        if (!in) throw std::runtime_error("cannot open " + a.input);
        statements = read_statements(in, domain);
    }
    const CirInstance inst = CirInstance::make(statements, domain.size());
    const Decision d = CirEngine(a.decide.config()).decide(inst);
    ordered_json j;
    j["verdict"] = std::string(to_string(d.verdict));
    j["stage"] = d.trace.concluded_by ? ordered_json(std::string(to_string(*d.trace.concluded_by))) : ordered_json("none");
    const ordered_json t = trace_json(d.trace);
    for (auto it = t.begin(); it != t.end(); ++it) j[it.key()] = it.value();
    j["statements"] = statements.size();
    ordered_json spec;
    spec["subcommand"] = "check";
    spec["input"] = a.input;
    spec["decide"] = a.decide.spec();
    j["run_spec"] = spec;
    std::cout << j.dump(2) << "\n";
    return d.verdict == Verdict::Consistent ? kExitConsistent : kExitInconsistent;
}

// ---- pc -------------------------------------------------------------------

struct PcArgs {
    std::string input;
    std::string backend = "oracle";
    std::string checker = "off";
    std::string ed_policy = "abort";
    std::string inject;
    std::uint64_t seed = 0;
    double alpha = kDefaultAlpha;
    int max_order = -1;
    bool meek_r4 = false;
    bool no_commit_entailed = false;
    int threshold = kDefaultInconsistencyThreshold;
    bool no_timing = false;
    std::string out;
    std::string log;
    DecideFlags decide;
};

int cmd_pc(const PcArgs& a) {
    std::optional<DAG> truth;
    Domain vars;
    BackendFactory factory;
    if (a.backend == "oracle") {
        const std::string text = read_file(a.input);
        const auto j = nlohmann::json::parse(text);
        // A network file carries CPTs; a bare DAG file is accepted too.
        truth = j.contains("cpts") ? net_from_json(text).dag() : dag_from_json(text);
        vars = truth->domain();
        factory = [g = *truth] { return std::make_shared<OracleTest>(g); };
    } else {
        std::ifstream in(a.input);
        if (!in) throw std::runtime_error("cannot open " + a.input);
        auto data = std::make_shared<const Dataset>(read_csv(in));
        vars = Domain(data->names);
        factory = [data, alpha = a.alpha] { return std::make_shared<Chi2Test>(data, alpha); };
    }

    CheckerOptions co;
    co.mode = parse_checker_mode(a.checker);
    co.ed_policy = a.ed_policy == "alert" ? EdPolicy::Alert : EdPolicy::Abort;
    co.inconsistency_threshold = a.threshold;
    co.commit_entailed = !a.no_commit_entailed;
    co.decide = a.decide.config();
    PcConfig pc;
    pc.max_order = a.max_order;
    pc.meek_r4 = a.meek_r4;
    const InjectionSpec inject = InjectionSpec::parse(a.inject);

    const PcExperiment ex = run_pc_experiment(vars, factory, co, inject, a.seed, pc);

    ordered_json j = ordered_json::parse(pc_report_to_json(ex.report, !a.no_timing));
    j["clean_tests"] = ex.clean_tests;
    j["injected"] = ex.flips;
    j["first_injection"] = ex.first_injection ? ordered_json(*ex.first_injection) : ordered_json(nullptr);
    j["first_alarm"] = ex.first_alarm ? ordered_json(*ex.first_alarm) : ordered_json(nullptr);
    j["detection_position"] =
        ex.detection_position ? ordered_json(*ex.detection_position) : ordered_json(nullptr);
    if (truth) j["shd_to_truth"] = shd(ex.report.pdag, cpdag_of(*truth));
    ordered_json spec;
    spec["subcommand"] = "pc";
    spec["input"] = a.input;
    spec["backend"] = a.backend;
    spec["checker"] = a.checker;
    spec["ed_policy"] = a.ed_policy;
    spec["inject"] = inject.to_string();
    spec["seed"] = a.seed;
    spec["alpha"] = a.alpha;
    spec["max_order"] = a.max_order;
    spec["meek_r4"] = a.meek_r4;
    spec["commit_entailed"] = !a.no_commit_entailed;
    spec["threshold"] = a.threshold;
    spec["decide"] = a.decide.spec();
    j["run_spec"] = spec;
    emit(a.out, j.dump(2));

    if (!a.log.empty()) {
        std::ofstream log(a.log, std::ios::binary);
        if (!log) throw std::runtime_error("cannot write " + a.log);
        for (const auto& rec : ex.report.log) log << test_log_record(vars, rec.index, rec.result) << "\n";
    }
    return ex.report.aborted ? kExitAborted : kExitConsistent;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
    int n = 5;
    double p = kDefaultEdgeProb;
    double alpha = kDefaultDirichletAlpha;
    long long m = 10000;
    int card = 2;
    std::uint64_t seed = 0;
    std::string out = ".";
};

int cmd_gen(const GenArgs& a) {
    if (a.m < 1) throw ValidationError("sample count must be at least 1");
    const GeneratedProblem g = generate_problem(a.n, a.p, a.alpha, static_cast<std::size_t>(a.m), a.seed, a.card);
    const fs::path dir(a.out);
    fs::create_directories(dir);
    write_file(dir / "network.json", net_to_json(g.net) + "\n");
    write_file(dir / "dag.json", dag_to_json(g.dag) + "\n");
    std::ostringstream csv;
    write_csv(csv, g.data);
    write_file(dir / "data.csv", csv.str());
    std::cout << (dir / "network.json").string() << "\n"
              << (dir / "data.csv").string() << "\n"
              << (dir / "dag.json").string() << "\n";
    return kExitConsistent;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
    std::string corpus;
    int generate_nodes = 0;
    double p = kDefaultEdgeProb;
    int count = 100;
    double flip_rate = 5.0;
    std::uint64_t seed = 0;
    std::vector<std::string> configs = {"o2", "o3", "full", "o2+o3+full"};
    int workers = 1;
    bool no_timing = false;
    std::string out;
    DecideFlags decide;
};

int cmd_bench(const BenchArgs& a) {
    std::vector<std::pair<std::string, std::vector<CIStatement>>> sources;
    Domain domain;
    if (a.generate_nodes > 0) {
        const DAG g = sample_er_dag(a.generate_nodes, a.p, a.seed);
        domain = g.domain();
        sources.emplace_back("generated", oracle_log(g));
    } else {
        if (a.corpus.empty()) throw ValidationError("bench needs a corpus directory or --generate-nodes");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(a.corpus)) {
            if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        // The first file fixes the variable names; later files must use the same ones.
        for (const auto& f : files) {
            std::ifstream in(f);
            sources.emplace_back(f.filename().string(), read_statements(in, domain));
        }
    }

    std::vector<BenchInstance> instances;
    if (!sources.empty()) {
        for (int i = 0; i < a.count; ++i) {
            const auto& [name, st] = sources[static_cast<std::size_t>(i) % sources.size()];
            BenchInstance b;
            b.source = name;
            b.statements = corrupt_statements(st, a.flip_rate, a.seed + static_cast<std::uint64_t>(i), &b.flipped);
            instances.push_back(std::move(b));
        }
    }
    const DecideConfig base = a.decide.config();
    std::vector<BenchConfig> configs;
    for (const auto& c : a.configs) configs.push_back(bench_config(c, base));
    const BenchReport r = run_bench(instances, configs, a.workers);

    ordered_json j = ordered_json::parse(bench_report_to_json(r, domain, !a.no_timing));
    ordered_json spec;
    spec["subcommand"] = "bench";
    spec["corpus"] = a.corpus;
    spec["generate_nodes"] = a.generate_nodes;
    spec["edge_prob"] = a.p;
    spec["count"] = a.count;
    spec["flip_rate"] = a.flip_rate;
    spec["seed"] = a.seed;
    spec["workers"] = a.workers;
    spec["decide"] = a.decide.spec();
    j["run_spec"] = spec;
    emit(a.out, j.dump(2));
    return kExitConsistent;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consistency checking for conditional-independence statements"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Decide whether a JSONL statement set is consistent");
    c->add_option("statements", check.input, "Statement JSONL file")->required();
    check.decide.attach(c);

    PcArgs pc;
    auto* p = app.add_subcommand("pc", "Run the PC algorithm with an optional checker");
    p->add_option("input", pc.input, "Network or DAG JSON (oracle) or dataset CSV (chi2)")->required();
    p->add_option("--backend", pc.backend, "CI-test backend")->check(CLI::IsMember({"oracle", "chi2"}));
    p->add_option("--checker", pc.checker, "Checker mode")->check(CLI::IsMember({"off", "ed", "p"}));
    p->add_option("--ed-policy", pc.ed_policy, "ED-Check reaction to an inconsistency")
        ->check(CLI::IsMember({"abort", "alert"}));
    p->add_option("--inject", pc.inject, "Error injection: rate=R or indices=i,j,...");
    p->add_option("--seed", pc.seed, "Seed for injection sampling");
    p->add_option("--alpha", pc.alpha, "Significance level of the chi-squared test")
        ->check(CLI::Range(0.0, 1.0));
    p->add_option("--max-order", pc.max_order, "Largest conditioning-set size (-1: n-2)");
    p->add_flag("--meek-r4", pc.meek_r4, "Also apply Meek's fourth rule");
    p->add_flag("--no-commit-entailed", pc.no_commit_entailed, "P-Check: keep entailed answers out of the KB");
    p->add_option("--threshold", pc.threshold, "P-Check inconsistencies before fallback")
        ->check(CLI::PositiveNumber);
    p->add_flag("--no-timing", pc.no_timing, "Omit wall time from the report");
    p->add_option("-o,--out", pc.out, "Report path (default stdout)");
    p->add_option("--log", pc.log, "Query log JSONL path");
    pc.decide.attach(p);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a random network, dataset and ground-truth DAG");
    g->add_option("--n", gen.n, "Number of variables")->check(CLI::Range(1, kMaxVariables));
    g->add_option("--p", gen.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
    g->add_option("--alpha", gen.alpha, "Dirichlet concentration for CPT rows")->check(CLI::PositiveNumber);
    g->add_option("--m", gen.m, "Number of samples");
    g->add_option("--card", gen.card, "Variable cardinality")->check(CLI::Range(2, 64));
    g->add_option("--seed", gen.seed, "Seed");
    g->add_option("-o,--out", gen.out, "Output directory");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Refutation benchmark over corrupted statement sets");
    b->add_option("corpus", bench.corpus, "Directory of clean statement JSONL files");
    b->add_option("--generate-nodes", bench.generate_nodes, "Use the oracle PC log of a random DAG instead")
        ->check(CLI::Range(2, kMaxVariables));
    b->add_option("--p", bench.p, "Edge probability for --generate-nodes")->check(CLI::Range(0.0, 1.0));
    b->add_option("--count", bench.count, "Corrupted instances to build")->check(CLI::NonNegativeNumber);
    b->add_option("--flip-rate", bench.flip_rate, "Percent of statements flipped per instance")
        ->check(CLI::Range(0.0, 100.0));
    b->add_option("--seed", bench.seed, "Seed");
    b->add_option("--configs", bench.configs, "Stage configurations")
        ->delimiter(',')
        ->check(CLI::IsMember({"o1", "o2", "o3", "full", "witness", "o2+o3+full", "all"}));
    b->add_option("--workers", bench.workers, "Instances decided concurrently")->check(CLI::PositiveNumber);
    b->add_flag("--no-timing", bench.no_timing, "Omit timings so reports compare byte-for-byte");
    b->add_option("-o,--out", bench.out, "Report path (default stdout)");
    bench.decide.attach(b);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (c->parsed()) return cmd_check(check);
        if (p->parsed()) return cmd_pc(pc);
        if (g->parsed()) return cmd_gen(gen);
        if (b->parsed()) return cmd_bench(bench);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
