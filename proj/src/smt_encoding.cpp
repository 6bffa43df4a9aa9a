#include "cicheck/smt_encoding.hpp"

#include <sstream>

namespace cicheck {

std::string_view to_string(Axiom a) {
    switch (a) {
        case Axiom::Symmetry: return "symmetry";
        case Axiom::Decomposition: return "decomposition";
        case Axiom::WeakUnion: return "weak_union";
        case Axiom::Contraction: return "contraction";
        case Axiom::Intersection: return "intersection";
        case Axiom::Composition: return "composition";
        case Axiom::WeakTransitivity: return "weak_transitivity";
        case Axiom::Chordality: return "chordality";
    }
    return "?";
}

std::vector<Axiom> AxiomSet::members() const {
    std::vector<Axiom> out;
    for (Axiom a : kAllAxioms) {
        if (has(a)) out.push_back(a);
    }
    return out;
}

std::uint64_t set2vec(VarSet s, int width) {
    if (width < 1 || width > kMaxVariables) throw ValidationError("bit-vector width out of range");
    if (s.span() > width) throw ValidationError("set reaches beyond the bit-vector width");
    return s.bits();
}

std::string bv_literal(std::uint64_t mask, int width) {
    std::string out = "#b";
    for (int i = width - 1; i >= 0; --i) out += ((mask >> i) & 1U) ? '1' : '0';
    return out;
}

std::string encode_fact(const CIStatement& s, int width) {
    validate(s);
    const std::string x = bv_literal(set2vec(s.x, width), width);
    const std::string y = bv_literal(set2vec(s.y, width), width);
    const std::string z = bv_literal(set2vec(s.z, width), width);
    return "(assert (= (CI " + x + " " + y + " " + z + ") " + (s.independent ? "#b01" : "#b00") + "))";
}

namespace {

struct Triple {
    std::string x, y, z;
};

std::string ci_is_indep(const Triple& t) { return "(= (CI " + t.x + " " + t.y + " " + t.z + ") #b01)"; }
std::string valid(const Triple& t) { return "(Valid " + t.x + " " + t.y + " " + t.z + ")"; }

std::string bv_sort(int width) { return "(_ BitVec " + std::to_string(width) + ")"; }

std::string forall(int width, std::string_view vars, const std::string& body) {
    std::string out = "(assert (forall (";
    bool first = true;
    for (char v : vars) {
        if (!first) out += " ";
        out += "(" + std::string(1, v) + " " + bv_sort(width) + ")";
        first = false;
    }
    return out + ") " + body + "))";
}

/// (=> (and singles... Valid(occ)... premises...) conclusion), conclusions joined by `or`.
std::string rule(const std::vector<Triple>& premises, const std::vector<Triple>& conclusions,
                 std::string_view singletons = "") {
    std::string guard = "(and";
    for (char v : singletons) guard += " (One " + std::string(1, v) + ")";
    for (const auto& t : premises) guard += " " + valid(t);
    for (const auto& t : conclusions) guard += " " + valid(t);
    for (const auto& t : premises) guard += " " + ci_is_indep(t);
    guard += ")";
    std::string concl;
    if (conclusions.size() == 1) {
        concl = ci_is_indep(conclusions.front());
    } else {
        concl = "(or";
        for (const auto& t : conclusions) concl += " " + ci_is_indep(t);
        concl += ")";
    }
    return "(=> " + guard + " " + concl + ")";
}

std::string conj(const std::vector<std::string>& parts) {
    if (parts.size() == 1) return parts.front();
    std::string out = "(and";
    for (const auto& p : parts) out += " " + p;
    return out + ")";
}

std::string axiom_assertion(Axiom a, int width, AxiomForm form) {
    const std::string yw = "(bvor y w)", zw = "(bvor z w)", zy = "(bvor z y)", zu = "(bvor z u)",
                      xy = "(bvor x y)";
    switch (a) {
        case Axiom::Symmetry:
            return forall(width, "xyz", "(= (CI x y z) (CI y x z))");
        case Axiom::Decomposition:
            return forall(width, "xyzw",
                          conj({rule({{"x", yw, "z"}}, {{"x", "y", "z"}}), rule({{"x", yw, "z"}}, {{"x", "w", "z"}})}));
        case Axiom::WeakUnion:
            return forall(width, "xyzw", rule({{"x", yw, "z"}}, {{"x", "y", zw}}));
        case Axiom::Contraction:
            return forall(width, "xyzw", rule({{"x", "y", "z"}, {"x", "w", zy}}, {{"x", yw, "z"}}));
        case Axiom::Intersection:
            return forall(width, "xyzw", rule({{"x", "y", zw}, {"x", "w", zy}}, {{"x", yw, "z"}}));
        case Axiom::Composition:
            return forall(width, "xyzw", rule({{"x", "y", "z"}, {"x", "w", "z"}}, {{"x", yw, "z"}}));
        case Axiom::WeakTransitivity:
            if (form == AxiomForm::Standard) {
                return forall(width, "xyzu",
                              rule({{"x", "y", "z"}, {"x", "y", zu}}, {{"x", "u", "z"}, {"u", "y", "z"}}, "u"));
            }
            return forall(width, "xyzwu",
                          conj({rule({{"x", "y", "z"}, {"x", "w", zu}}, {{"u", "y", "z"}}, "u"),
                                rule({{"x", "y", "z"}, {"x", "w", zu}}, {{"x", "u", "z"}}, "u")}));
        case Axiom::Chordality:
            if (form == AxiomForm::Standard) {
                return forall(width, "xyzw",
                              rule({{"x", "y", zw}, {"z", "w", xy}}, {{"x", "y", "z"}, {"x", "y", "w"}}, "xyzw"));
            }
            return forall(width, "xyzw",
                          conj({rule({{"x", "y", zw}, {"z", "w", xy}}, {{"x", "y", "z"}}, "xyzw"),
                                rule({{"x", "y", zw}, {"z", "w", xy}}, {{"x", "y", "w"}}, "xyzw")}));
    }
    return {};
}

}  // namespace

std::vector<std::string> encode_axioms(int width, AxiomSet axioms, AxiomForm form) {
    if (width < 1 || width > kMaxVariables) throw ValidationError("bit-vector width out of range");
    std::vector<std::string> out;
    for (Axiom a : axioms.members()) out.push_back(axiom_assertion(a, width, form));
    return out;
}

SmtInstance make_instance(int width, std::span<const CIStatement> statements, AxiomSet axioms, AxiomForm form) {
    SmtInstance inst;
    inst.width = width;
    inst.axioms = axioms;
    inst.form = form;
    for (const auto& s : statements) {
        validate(s);
        inst.facts.push_back({set2vec(s.x, width), set2vec(s.y, width), set2vec(s.z, width), s.independent});
    }
    return inst;
}

std::string emit_smtlib(const SmtInstance& inst) {
    const int w = inst.width;
    if (w < 1 || w > kMaxVariables) throw ValidationError("bit-vector width out of range");
    const std::string bv = bv_sort(w);
    const std::string zero = bv_literal(0, w);
    std::ostringstream out;
    out << "(set-logic UFBV)\n";
    // Independence bit of a valid triple; CI below maps it onto the 2-bit codes
    // 01 (independent), 00 (dependent) and 11 (invalid arguments).
    out << "(declare-fun Indep (" << bv << " " << bv << " " << bv << ") (_ BitVec 1))\n";
    out << "(define-fun Valid ((x " << bv << ") (y " << bv << ") (z " << bv << ")) Bool (and (= (bvand x y) "
        << zero << ") (= (bvand x z) " << zero << ") (= (bvand y z) " << zero << ") (not (= x " << zero
        << ")) (not (= y " << zero << "))))\n";
    out << "(define-fun CI ((x " << bv << ") (y " << bv << ") (z " << bv
        << ")) (_ BitVec 2) (ite (Valid x y z) (concat #b0 (Indep x y z)) #b11))\n";
    // |u| = 1 as a sum of extracted bits, in 8 bits so any width up to 63 fits.
    out << "(define-fun One ((u " << bv << ")) Bool (= (bvadd";
    for (int i = 0; i < w; ++i) out << " ((_ zero_extend 7) ((_ extract " << i << " " << i << ") u))";
    if (w == 1) out << " #x00";
    out << ") #x01))\n";
    for (Axiom a : inst.axioms.members()) {
        out << "; " << to_string(a) << "\n" << axiom_assertion(a, w, inst.form) << "\n";
    }
    for (const auto& f : inst.facts) {
        out << "(assert (= (CI " << bv_literal(f.x, w) << " " << bv_literal(f.y, w) << " " << bv_literal(f.z, w)
            << ") " << (f.independent ? "#b01" : "#b00") << "))\n";
    }
    out << "(check-sat)\n";
    return out.str();
}

}  // namespace cicheck
