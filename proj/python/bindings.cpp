// Python bindings. Structured values cross the boundary as JSON text; the package's
// __init__ converts them to and from Python objects.

#include <sstream>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cicheck/harness.hpp"

namespace py = pybind11;
using namespace cicheck;
using nlohmann::ordered_json;

namespace {

DecideConfig decide_config(bool o1, bool o2, bool witness, bool o3, bool full, int timeout_ms,
                           const std::optional<std::string>& solver) {
    DecideConfig c;
    c.o1 = o1;
    c.o2 = o2;
    c.witness = o2 && witness;
    c.o3 = o3;
    c.full = full;
    c.timeout_ms = timeout_ms;
    if (solver) c.solver = SolverConfig::resolve(*solver);
    return c;
}

std::string check(const std::string& jsonl, bool o1, bool o2, bool witness, bool o3, bool full, int timeout_ms,
                  const std::optional<std::string>& solver) {
    Domain domain;
    std::istringstream in(jsonl);
    const auto statements = read_statements(in, domain);
    const DecideConfig cfg = decide_config(o1, o2, witness, o3, full, timeout_ms, solver);
    Decision d;
    {
        py::gil_scoped_release release;
        d = CirEngine(cfg).decide(CirInstance::make(statements, domain.size()));
    }
    ordered_json j;
    j["verdict"] = std::string(to_string(d.verdict));
    j["stage"] = d.trace.concluded_by ? std::string(to_string(*d.trace.concluded_by)) : std::string("none");
    ordered_json stages = ordered_json::object();
    for (const auto& s : d.trace.stages) stages[std::string(to_string(s.stage))] = std::string(to_string(s.result));
    j["stage_results"] = stages;
    j["full_status"] =
        d.trace.full_status ? ordered_json(std::string(to_string(*d.trace.full_status))) : ordered_json(nullptr);
    j["unknown_as_consistent"] = d.trace.unknown_as_consistent;
    j["solver_calls"] = d.trace.solver_calls;
    j["total_ms"] = d.trace.total_ms;
    return j.dump();
}

std::string smtlib(const std::string& jsonl, const std::string& form) {
    Domain domain;
    std::istringstream in(jsonl);
    const auto statements = read_statements(in, domain);
    const AxiomForm f = form == "appendix-verbatim" ? AxiomForm::AppendixVerbatim : AxiomForm::Standard;
    return emit_smtlib(make_instance(std::max(domain.size(), 1), statements, AxiomSet::all(), f));
}

bool dsep(const std::string& dag_json, const std::vector<std::string>& x, const std::vector<std::string>& y,
          const std::vector<std::string>& z) {
    const DAG g = dag_from_json(dag_json);
    return d_separated(g, g.domain().parse(x), g.domain().parse(y), g.domain().parse(z));
}

py::dict generate(int n, double p, double alpha, std::size_t m, std::uint64_t seed, int card) {
    const GeneratedProblem gp = generate_problem(n, p, alpha, m, seed, card);
    std::ostringstream csv;
    write_csv(csv, gp.data);
    py::dict out;
    out["network"] = net_to_json(gp.net);
    out["dag"] = dag_to_json(gp.dag);
    out["csv"] = csv.str();
    return out;
}

std::string pc(const std::string& dag_json, const std::string& checker, const std::string& ed_policy,
               const std::string& inject, std::uint64_t seed, int max_order) {
    const DAG truth = dag_from_json(dag_json);
    CheckerOptions co;
    co.mode = parse_checker_mode(checker);
    co.ed_policy = ed_policy == "alert" ? EdPolicy::Alert : EdPolicy::Abort;
    PcConfig cfg;
    cfg.max_order = max_order;
    const BackendFactory factory = [&truth] { return std::make_shared<OracleTest>(truth); };
    PcExperiment ex;
    {
        py::gil_scoped_release release;
        ex = run_pc_experiment(truth.domain(), factory, co, InjectionSpec::parse(inject), seed, cfg);
    }
    ordered_json j = ordered_json::parse(pc_report_to_json(ex.report, false));
    j["clean_tests"] = ex.clean_tests;
    j["injected"] = ex.flips;
    j["first_alarm"] = ex.first_alarm ? ordered_json(*ex.first_alarm) : ordered_json(nullptr);
    j["detection_position"] = ex.detection_position ? ordered_json(*ex.detection_position) : ordered_json(nullptr);
    j["shd_to_truth"] = shd(ex.report.pdag, cpdag_of(truth));
    return j.dump();
}

py::dict chi2(const std::string& csv, const std::vector<std::string>& x, const std::vector<std::string>& y,
              const std::vector<std::string>& z, double alpha) {
    std::istringstream in(csv);
    const Dataset data = read_csv(in);
    const Domain d(data.names);
    const CITestResult r = chi2_test(data, {d.parse(x), d.parse(y), d.parse(z), 0}, alpha);
    py::dict out;
    out["independent"] = r.statement.independent;
    out["p_value"] = r.p_value ? py::cast(*r.p_value) : py::none();
    out["statistic"] = r.statistic ? py::cast(*r.statistic) : py::none();
    out["df"] = r.df ? py::cast(*r.df) : py::none();
    out["low_support"] = r.low_support;
    return out;
}

}  // namespace

PYBIND11_MODULE(_cicheck, m) {
    m.doc() = "Consistency checking of conditional-independence statements";
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SolverConfigError>(m, "SolverConfigError", PyExc_RuntimeError);

    m.def("check", &check, py::arg("jsonl"), py::arg("o1") = true, py::arg("o2") = true, py::arg("witness") = true,
          py::arg("o3") = true, py::arg("full") = true, py::arg("timeout_ms") = 60000,
          py::arg("solver") = std::nullopt);
    m.def("emit_smtlib", &smtlib, py::arg("jsonl"), py::arg("form") = "standard");
    m.def("d_separated", &dsep, py::arg("dag_json"), py::arg("x"), py::arg("y"), py::arg("z"));
    m.def("generate", &generate, py::arg("n"), py::arg("p") = kDefaultEdgeProb,
          py::arg("alpha") = kDefaultDirichletAlpha, py::arg("m") = 1000, py::arg("seed") = 0, py::arg("card") = 2);
    m.def("run_pc", &pc, py::arg("dag_json"), py::arg("checker") = "off", py::arg("ed_policy") = "abort",
          py::arg("inject") = "", py::arg("seed") = 0, py::arg("max_order") = -1);
    m.def("chi2_test", &chi2, py::arg("csv"), py::arg("x"), py::arg("y"), py::arg("z"),
          py::arg("alpha") = kDefaultAlpha);
}
