#include "cicheck/core_model.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace cicheck {

using ordered_json = nlohmann::ordered_json;

std::vector<int> VarSet::members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for_each([&](int i) { out.push_back(i); });
    return out;
}

Domain::Domain(std::vector<std::string> names) : names_(std::move(names)) {
    if (static_cast<int>(names_.size()) > kMaxVariables) {
        throw ValidationError("domain exceeds " + std::to_string(kMaxVariables) + " variables");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw ValidationError("empty variable name");
        if (!index_.emplace(names_[i], static_cast<int>(i)).second) {
            throw ValidationError("duplicate variable name '" + names_[i] + "'");
        }
    }
}

Domain Domain::anonymous(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i));
    return Domain(std::move(names));
}

std::optional<int> Domain::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int Domain::index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) throw ValidationError("unknown variable '" + std::string(name) + "'");
    return *i;
}

VarSet Domain::parse(const std::vector<std::string>& names) const {
    VarSet s;
    for (const auto& n : names) s |= VarSet::single(index_of(n));
    return s;
}

std::vector<std::string> Domain::names_of(VarSet s) const {
    std::vector<std::string> out;
    s.for_each([&](int i) { out.push_back(name(i)); });
    return out;
}

std::string Domain::format(VarSet s) const {
    std::string out = "{";
    bool first = true;
    s.for_each([&](int i) {
        if (!first) out += ",";
        out += name(i);
        first = false;
    });
    return out + "}";
}

bool is_valid_triple(VarSet x, VarSet y, VarSet z) {
    return x.disjoint(y) && x.disjoint(z) && y.disjoint(z) && !x.empty() && !y.empty();
}

void validate(const CIStatement& s) {
    if (s.x.empty() || s.y.empty()) throw ValidationError("CI statement with an empty operand");
    if (!is_valid_triple(s.x, s.y, s.z)) throw ValidationError("CI statement with overlapping sets");
    if (s.x.span() > kMaxVariables || s.y.span() > kMaxVariables || s.z.span() > kMaxVariables) {
        throw ValidationError("CI statement outside the supported domain");
    }
}

CIStatement canonicalize(const CIStatement& s) {
    validate(s);
    if (s.y < s.x) return {s.y, s.x, s.z, s.independent};
    return s;
}

CIStatement make_statement(VarSet x, VarSet y, VarSet z, bool independent) {
    return canonicalize({x, y, z, independent});
}

CIStatement negate(const CIStatement& s) { return {s.x, s.y, s.z, !s.independent}; }

bool is_canonical(const CIStatement& s) { return is_valid_triple(s.x, s.y, s.z) && s.x < s.y; }

bool is_marginal(const CIStatement& s) { return s.z.empty(); }

VarSet support(const CIStatement& s) { return s.x | s.y | s.z; }

VarSet overlap(const CIStatement& a, const CIStatement& b) { return support(a) & support(b); }

VarSet overlap(const Domain& domain, const CIStatement& a, const CIStatement& b) {
    if (!domain.covers(support(a)) || !domain.covers(support(b))) {
        throw ValidationError("statement outside the domain of size " + std::to_string(domain.size()));
    }
    return overlap(a, b);
}

TripleKey key_of(const CIStatement& s) { return {s.x, s.y, s.z}; }

std::string to_string(const Domain& domain, const CIStatement& s) {
    std::string out = domain.format(s.x) + (s.independent ? " _||_ " : " !_||_ ") + domain.format(s.y);
    if (!s.z.empty()) out += " | " + domain.format(s.z);
    return out;
}

std::string_view to_string(StageResult r) {
    switch (r) {
        case StageResult::Consistent: return "consistent";
        case StageResult::Inconsistent: return "inconsistent";
        case StageResult::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    return v == Verdict::Consistent ? "consistent" : "inconsistent";
}

bool KnowledgeBase::add(const CIStatement& s, bool snapshot_before) {
    if (!is_canonical(s)) throw ValidationError("knowledge base accepts canonical statements only");
    auto& e = index_[key_of(s)];
    bool& slot = s.independent ? e.has_indep : e.has_dep;
    if (slot) return false;
    if (snapshot_before) snapshot();
    slot = true;
    if (e.has_indep && e.has_dep) ++conflicts_;
    statements_.push_back(s);
    return true;
}

void KnowledgeBase::rollback() {
    if (snapshots_.empty()) throw std::logic_error("rollback without a snapshot");
    statements_.resize(snapshots_.back());
    snapshots_.pop_back();
    ++inconsistency_count_;
    rebuild_index();
}

void KnowledgeBase::rebuild_index() {
    index_.clear();
    conflicts_ = 0;
    for (const auto& s : statements_) {
        auto& e = index_[key_of(s)];
        (s.independent ? e.has_indep : e.has_dep) = true;
        if (e.has_indep && e.has_dep) ++conflicts_;
    }
}

bool KnowledgeBase::contains(const CIStatement& s) const {
    auto it = index_.find(key_of(s));
    if (it == index_.end()) return false;
    return s.independent ? it->second.has_indep : it->second.has_dep;
}

std::optional<bool> KnowledgeBase::lookup(const TripleKey& k) const {
    auto it = index_.find(k);
    if (it == index_.end()) return std::nullopt;
    if (it->second.has_indep && !it->second.has_dep) return true;
    if (it->second.has_dep && !it->second.has_indep) return false;
    return std::nullopt;
}

std::string statement_to_json(const Domain& domain, const CIStatement& s) {
    ordered_json j;
    j["x"] = domain.names_of(s.x);
    j["y"] = domain.names_of(s.y);
    j["z"] = domain.names_of(s.z);
    j["independent"] = s.independent;
    return j.dump();
}

namespace {

std::vector<std::string> name_list(const nlohmann::json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + field + "'");
    if (!it->is_array()) throw ValidationError(std::string("field '") + field + "' is not an array");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw ValidationError(std::string("non-string name in '") + field + "'");
        out.push_back(v.get<std::string>());
    }
    return out;
}

CIStatement parse_record(const nlohmann::json& j, Domain* grow, const Domain& domain) {
    if (!j.is_object()) throw ValidationError("record is not an object");
    for (const auto& [k, v] : j.items()) {
        if (k != "x" && k != "y" && k != "z" && k != "independent") {
            throw ValidationError("unknown field '" + k + "'");
        }
    }
    auto it = j.find("independent");
    if (it == j.end() || !it->is_boolean()) throw ValidationError("missing boolean 'independent'");
    auto xs = name_list(j, "x");
    auto ys = name_list(j, "y");
    auto zs = name_list(j, "z");
    if (grow != nullptr) {
        std::vector<std::string> names = grow->names();
        for (const auto* list : {&xs, &ys, &zs}) {
            for (const auto& n : *list) {
                if (!grow->find(n) && std::find(names.begin(), names.end(), n) == names.end()) {
                    names.push_back(n);
                }
            }
        }
        if (names.size() != grow->names().size()) *grow = Domain(std::move(names));
    }
    const Domain& d = grow != nullptr ? *grow : domain;
    return make_statement(d.parse(xs), d.parse(ys), d.parse(zs), it->get<bool>());
}

}  // namespace

CIStatement statement_from_json(const Domain& domain, std::string_view line) {
    auto j = nlohmann::json::parse(line);
    return parse_record(j, nullptr, domain);
}

std::vector<CIStatement> read_statements(std::istream& in, Domain& domain) {
    const bool grow = domain.size() == 0;
    std::vector<CIStatement> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            out.push_back(parse_record(j, grow ? &domain : nullptr, domain));
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
        }
    }
    return out;
}

void write_statements(std::ostream& out, const Domain& domain, const std::vector<CIStatement>& statements) {
    for (const auto& s : statements) out << statement_to_json(domain, s) << '\n';
}

}  // namespace cicheck
