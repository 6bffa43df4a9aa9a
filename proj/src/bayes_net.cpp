#include "cicheck/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cicheck/random.hpp"

namespace cicheck {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kRowTolerance = 1e-9;

std::size_t expected_rows(const DAG& dag, const std::vector<int>& cards, int v) {
    std::size_t rows = 1;
    dag.parents(v).for_each([&](int p) { rows *= static_cast<std::size_t>(cards[static_cast<std::size_t>(p)]); });
    return rows;
}

}  // namespace

DiscreteBayesNet::DiscreteBayesNet(DAG dag, std::vector<int> cards, std::vector<Cpt> cpts)
    : dag_(std::move(dag)), cards_(std::move(cards)), cpts_(std::move(cpts)) {
    const auto n = static_cast<std::size_t>(dag_.size());
    if (cards_.size() != n) throw ValidationError("cardinality list length differs from node count");
    if (cpts_.size() != n) throw ValidationError("CPT list length differs from node count");
    for (int c : cards_) {
        if (c < 2) throw ValidationError("variable cardinality must be at least 2");
    }
    for (int v = 0; v < dag_.size(); ++v) {
        const auto& cpt = cpts_[static_cast<std::size_t>(v)];
        if (cpt.size() != expected_rows(dag_, cards_, v)) {
            throw ValidationError("CPT of '" + dag_.domain().name(v) + "' has the wrong row count");
        }
        for (std::size_t r = 0; r < cpt.size(); ++r) {
            if (static_cast<int>(cpt[r].size()) != card(v)) {
                throw ValidationError("CPT of '" + dag_.domain().name(v) + "' row " + std::to_string(r) +
                                      " has the wrong width");
            }
            double total = 0.0;
            for (double p : cpt[r]) {
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw ValidationError("CPT of '" + dag_.domain().name(v) + "' row " + std::to_string(r) +
                                          " has a probability outside [0,1]");
                }
                total += p;
            }
            if (std::abs(total - 1.0) > kRowTolerance) {
                throw ValidationError("CPT of '" + dag_.domain().name(v) + "' row " + std::to_string(r) +
                                      " sums to " + std::to_string(total));
            }
        }
    }
}

std::size_t DiscreteBayesNet::row_count(int v) const { return cpt(v).size(); }

std::size_t DiscreteBayesNet::row_of(int v, const std::vector<int>& values) const {
    std::size_t row = 0;
    dag_.parents(v).for_each([&](int p) {
        row = row * static_cast<std::size_t>(card(p)) + static_cast<std::size_t>(values[static_cast<std::size_t>(p)]);
    });
    return row;
}

DiscreteBayesNet sample_cpts(const DAG& dag, const std::vector<int>& cards, double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0)) throw ValidationError("Dirichlet concentration must be positive");
    if (cards.size() != static_cast<std::size_t>(dag.size())) {
        throw ValidationError("cardinality list length differs from node count");
    }
    for (int c : cards) {
        if (c < 2) throw ValidationError("variable cardinality must be at least 2");
    }
    Rng rng(seed);
    std::vector<DiscreteBayesNet::Cpt> cpts;
    for (int v = 0; v < dag.size(); ++v) {
        DiscreteBayesNet::Cpt cpt;
        const std::size_t rows = expected_rows(dag, cards, v);
        for (std::size_t r = 0; r < rows; ++r) {
            auto row = rng.dirichlet(cards[static_cast<std::size_t>(v)], alpha);
            // Fold rounding error into the largest entry so rows sum to 1 exactly enough.
            double total = 0.0;
            for (double p : row) total += p;
            auto it = std::max_element(row.begin(), row.end());
            *it += 1.0 - total;
            cpt.push_back(std::move(row));
        }
        cpts.push_back(std::move(cpt));
    }
    return DiscreteBayesNet(dag, cards, std::move(cpts));
}

Dataset forward_sample(const DiscreteBayesNet& bn, std::size_t m, std::uint64_t seed) {
    if (m < 1) throw ValidationError("sample count must be at least 1");
    Rng rng(seed);
    Dataset data;
    data.names = bn.dag().domain().names();
    data.rows.reserve(m);
    std::vector<int> values(static_cast<std::size_t>(bn.size()));
    for (std::size_t i = 0; i < m; ++i) {
        for (int v : bn.dag().topological_order()) {
            const auto& row = bn.cpt(v)[bn.row_of(v, values)];
            values[static_cast<std::size_t>(v)] = rng.categorical(row);
        }
        data.rows.push_back(values);
    }
    return data;
}

std::string net_to_json(const DiscreteBayesNet& bn) {
    const Domain& d = bn.dag().domain();
    ordered_json j;
    j["n"] = d.size();
    j["names"] = d.names();
    j["cards"] = bn.cards();
    ordered_json edges = ordered_json::array();
    for (auto [p, c] : bn.dag().edges()) edges.push_back({p, c});
    j["edges"] = std::move(edges);
    ordered_json cpts = ordered_json::object();
    for (int v = 0; v < bn.size(); ++v) cpts[d.name(v)] = bn.cpt(v);
    j["cpts"] = std::move(cpts);
    return j.dump();
}

DiscreteBayesNet net_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw ValidationError("network JSON must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k != "n" && k != "names" && k != "cards" && k != "edges" && k != "cpts") {
            throw ValidationError("unknown field '" + k + "'");
        }
    }
    for (const char* f : {"n", "names", "cards", "edges", "cpts"}) {
        if (!j.contains(f)) throw ValidationError(std::string("missing field '") + f + "'");
    }
    const int n = j.at("n").get<int>();
    auto names = j.at("names").get<std::vector<std::string>>();
    if (static_cast<int>(names.size()) != n) throw ValidationError("'names' length differs from 'n'");
    Domain domain(names);
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw ValidationError("malformed edge");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    DAG dag(domain, edges);
    auto cards = j.at("cards").get<std::vector<int>>();
    const auto& cj = j.at("cpts");
    if (!cj.is_object()) throw ValidationError("'cpts' must be an object");
    for (const auto& [k, v] : cj.items()) {
        if (!domain.find(k)) throw ValidationError("CPT for unknown variable '" + k + "'");
    }
    std::vector<DiscreteBayesNet::Cpt> cpts;
    for (const auto& name : names) {
        if (!cj.contains(name)) throw ValidationError("missing CPT for '" + name + "'");
        cpts.push_back(cj.at(name).get<DiscreteBayesNet::Cpt>());
    }
    return DiscreteBayesNet(std::move(dag), std::move(cards), std::move(cpts));
}

void save_net(const std::string& path, const DiscreteBayesNet& bn) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << net_to_json(bn) << '\n';
}

DiscreteBayesNet load_net(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return net_from_json(ss.str());
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.names.size(); ++i) out << (i ? "," : "") << data.names[i];
    out << '\n';
    for (const auto& row : data.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

Dataset read_csv(std::istream& in) {
    Dataset data;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) throw ValidationError("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    data.names = split(line);
    Domain check(data.names);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != data.names.size()) {
            throw ValidationError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(data.names.size()));
        }
        std::vector<int> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            std::size_t pos = 0;
            int v = 0;
            try {
                v = std::stoi(c, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != c.size() || c.empty() || v < 0) {
                throw ValidationError("CSV line " + std::to_string(lineno) + ": bad category code '" + c + "'");
            }
            row.push_back(v);
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace cicheck
