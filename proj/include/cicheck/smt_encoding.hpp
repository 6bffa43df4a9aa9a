#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cicheck/core_model.hpp"

namespace cicheck {

enum class Axiom {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    Composition,
    WeakTransitivity,
    Chordality,
};

inline constexpr std::array<Axiom, 8> kAllAxioms = {
    Axiom::Symmetry,    Axiom::Decomposition, Axiom::WeakUnion,        Axiom::Contraction,
    Axiom::Intersection, Axiom::Composition,  Axiom::WeakTransitivity, Axiom::Chordality,
};

std::string_view to_string(Axiom a);

/// Bit flags over kAllAxioms.
class AxiomSet {
public:
    constexpr AxiomSet() = default;
    static constexpr AxiomSet all() { return AxiomSet(0xFF); }
    static constexpr AxiomSet only(Axiom a) { return AxiomSet(static_cast<std::uint8_t>(1U << static_cast<unsigned>(a))); }

    constexpr bool has(Axiom a) const { return (bits_ >> static_cast<unsigned>(a)) & 1U; }
    constexpr AxiomSet with(Axiom a) const { return AxiomSet(static_cast<std::uint8_t>(bits_ | (1U << static_cast<unsigned>(a)))); }
    constexpr AxiomSet without(Axiom a) const { return AxiomSet(static_cast<std::uint8_t>(bits_ & ~(1U << static_cast<unsigned>(a)))); }
    constexpr int count() const { return std::popcount(bits_); }
    std::vector<Axiom> members() const;

    constexpr bool operator==(const AxiomSet&) const = default;

private:
    constexpr explicit AxiomSet(std::uint8_t bits) : bits_(bits) {}
    std::uint8_t bits_ = 0;
};

/// How weak transitivity and chordality are written.
///  Standard: disjunctive conclusions, premises as in the graphoid literature.
///  AppendixVerbatim: each split into two implications, weak transitivity's
///  second premise over a free set W.
enum class AxiomForm { Standard, AppendixVerbatim };

struct SmtFact {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    std::uint64_t z = 0;
    bool independent = true;
};

struct SmtInstance {
    int width = 0;
    std::vector<SmtFact> facts;
    AxiomSet axioms = AxiomSet::all();
    AxiomForm form = AxiomForm::Standard;
    int timeout_ms = 60000;
};

/// Bit i set iff variable i is in s; throws if s reaches beyond `width`.
std::uint64_t set2vec(VarSet s, int width);
/// SMT-LIB binary literal, most significant bit first: {X} over 3 vars -> "#b001".
std::string bv_literal(std::uint64_t mask, int width);

/// "(assert (= (CI #b.. #b.. #b..) #b01))" for independence, #b00 for dependence.
std::string encode_fact(const CIStatement& s, int width);
/// Quantified assertions, one per enabled axiom, each CI occurrence guarded by Valid.
std::vector<std::string> encode_axioms(int width, AxiomSet axioms, AxiomForm form = AxiomForm::Standard);

SmtInstance make_instance(int width, std::span<const CIStatement> statements, AxiomSet axioms = AxiomSet::all(),
                          AxiomForm form = AxiomForm::Standard);

/// Deterministic SMT-LIB2 script ending in (check-sat).
std::string emit_smtlib(const SmtInstance& inst);

}  // namespace cicheck
