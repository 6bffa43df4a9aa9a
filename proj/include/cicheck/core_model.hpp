#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cicheck {

/// Largest supported domain; a variable set must fit one machine word.
inline constexpr int kMaxVariables = 63;

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A set of variables stored as a bit mask; bit i set iff variable i is a member.
class VarSet {
public:
    constexpr VarSet() = default;
    constexpr explicit VarSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr VarSet single(int index) { return VarSet(std::uint64_t{1} << index); }
    static constexpr VarSet range(int n) {
        return VarSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool contains(int index) const { return (bits_ >> index) & 1U; }
    constexpr bool subset_of(VarSet other) const { return (bits_ & other.bits_) == bits_; }
    constexpr bool disjoint(VarSet other) const { return (bits_ & other.bits_) == 0; }
    /// Highest member index plus one; 0 for the empty set.
    constexpr int span() const { return 64 - std::countl_zero(bits_); }

    constexpr VarSet operator|(VarSet o) const { return VarSet(bits_ | o.bits_); }
    constexpr VarSet operator&(VarSet o) const { return VarSet(bits_ & o.bits_); }
    constexpr VarSet operator-(VarSet o) const { return VarSet(bits_ & ~o.bits_); }
    constexpr VarSet& operator|=(VarSet o) { bits_ |= o.bits_; return *this; }

    constexpr auto operator<=>(const VarSet&) const = default;

    std::vector<int> members() const;

    template <class F>
    void for_each(F&& f) const {
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) f(std::countr_zero(b));
    }

private:
    std::uint64_t bits_ = 0;
};

/// Named variables with dense indices 0..n-1.
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<std::string> names);
    /// Domain with names V0..V{n-1}.
    static Domain anonymous(int n);

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
    std::optional<int> find(std::string_view name) const;
    int index_of(std::string_view name) const;
    VarSet all() const { return VarSet::range(size()); }
    bool covers(VarSet s) const { return s.subset_of(all()); }

    VarSet parse(const std::vector<std::string>& names) const;
    std::vector<std::string> names_of(VarSet s) const;
    std::string format(VarSet s) const;

    bool operator==(const Domain&) const = default;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

/// (x ⊥ y | z) when independent, (x ⊥̸ y | z) otherwise.
struct CIStatement {
    VarSet x;
    VarSet y;
    VarSet z;
    bool independent = true;

    bool operator==(const CIStatement&) const = default;
};

/// The set triple of a statement, ignoring its flag.
struct TripleKey {
    VarSet x;
    VarSet y;
    VarSet z;

    bool operator==(const TripleKey&) const = default;
    auto operator<=>(const TripleKey&) const = default;
};

struct TripleKeyHash {
    std::size_t operator()(const TripleKey& k) const noexcept {
        std::uint64_t h = k.x.bits() * 0x9E3779B97F4A7C15ULL;
        h ^= k.y.bits() + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
        h ^= k.z.bits() * 0xBF58476D1CE4E5B9ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

/// Disjointness of x, y, z and non-emptiness of x and y.
bool is_valid_triple(VarSet x, VarSet y, VarSet z);
void validate(const CIStatement& s);

/// Symmetry normal form: the operand with the smaller mask comes first.
CIStatement canonicalize(const CIStatement& s);
CIStatement make_statement(VarSet x, VarSet y, VarSet z, bool independent);
CIStatement negate(const CIStatement& s);
bool is_canonical(const CIStatement& s);
bool is_marginal(const CIStatement& s);
VarSet support(const CIStatement& s);
VarSet overlap(const CIStatement& a, const CIStatement& b);
/// Same as above but rejects statements that reach outside `domain`.
VarSet overlap(const Domain& domain, const CIStatement& a, const CIStatement& b);
TripleKey key_of(const CIStatement& s);

std::string to_string(const Domain& domain, const CIStatement& s);

enum class StageResult { Consistent, Inconsistent, Inconclusive };
enum class Verdict { Consistent, Inconsistent };

std::string_view to_string(StageResult r);
std::string_view to_string(Verdict v);

/// The ordered set Σ of accepted statements with snapshot/rollback.
class KnowledgeBase {
public:
    explicit KnowledgeBase(int fallback_threshold = 10) : fallback_threshold_(fallback_threshold) {}

    /// Appends a canonical statement. Returns false if an identical statement was already present.
    bool add(const CIStatement& s, bool snapshot_before = false);
    void snapshot() { snapshots_.push_back(statements_.size()); }
    /// Restores the most recent snapshot prefix and counts one inconsistency.
    void rollback();

    const std::vector<CIStatement>& statements() const { return statements_; }
    std::size_t size() const { return statements_.size(); }
    bool empty() const { return statements_.empty(); }
    bool contains(const CIStatement& s) const;
    /// Flag recorded for the triple, if any statement about it is present.
    std::optional<bool> lookup(const TripleKey& k) const;

    /// True while some triple appears with both flags.
    bool degenerate_conflict() const { return conflicts_ > 0; }
    std::size_t snapshot_count() const { return snapshots_.size(); }
    int inconsistency_count() const { return inconsistency_count_; }
    int fallback_threshold() const { return fallback_threshold_; }
    bool fallback_triggered() const { return inconsistency_count_ >= fallback_threshold_; }

private:
    struct Entry {
        bool has_indep = false;
        bool has_dep = false;
    };
    void rebuild_index();

    std::vector<CIStatement> statements_;
    std::vector<std::size_t> snapshots_;
    std::unordered_map<TripleKey, Entry, TripleKeyHash> index_;
    std::size_t conflicts_ = 0;
    int inconsistency_count_ = 0;
    int fallback_threshold_;
};

// JSONL persistence: {"x":[...],"y":[...],"z":[...],"independent":bool}
std::string statement_to_json(const Domain& domain, const CIStatement& s);
CIStatement statement_from_json(const Domain& domain, std::string_view line);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads one statement per non-blank line. If `domain` is empty it is grown from the names
/// in order of first appearance.
std::vector<CIStatement> read_statements(std::istream& in, Domain& domain);
void write_statements(std::ostream& out, const Domain& domain, const std::vector<CIStatement>& statements);

}  // namespace cicheck
