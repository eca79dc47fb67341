#pragma once

// Binary CSP instances and patterns.
//
// An Instance keeps its original domains and relations for its whole life.
// Preprocessing only flips liveness bits (values) and activity bits
// (variables), so any earlier state can be restored by undoing those flips.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cspprune {

using VarId = std::uint32_t;
using Value = std::uint32_t;

struct Assignment
{
    VarId var = 0;
    Value val = 0;

    auto operator<=>(const Assignment &) const = default;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Malformed or semantically invalid input (documents, constraint lists).
class InputError : public std::runtime_error
{
public:
    InputError(const std::string & what, std::size_t line = 0, std::size_t column = 0) :
        std::runtime_error(line ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")" : what),
        line_(line),
        column_(column)
    {
    }

    auto line() const -> std::size_t { return line_; }
    auto column() const -> std::size_t { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// An exhaustive search would exceed its configured budget.
class SizeLimitExceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Indexed by VarId; unassigned variables hold nullopt.
using PartialAssignment = std::vector<std::optional<Value>>;
using Solution = PartialAssignment;

/// Allowed pairs of one binary constraint, stored densely.
class Relation
{
public:
    Relation(Value rows, Value cols) : rows_(rows), cols_(cols), allowed_(std::size_t(rows) * cols, 0) {}

    auto rows() const -> Value { return rows_; }
    auto cols() const -> Value { return cols_; }

    auto allows(Value row, Value col) const -> bool { return allowed_[std::size_t(row) * cols_ + col] != 0; }
    void allow(Value row, Value col) { allowed_[std::size_t(row) * cols_ + col] = 1; }

private:
    Value rows_;
    Value cols_;
    std::vector<std::uint8_t> allowed_;
};

struct ConstraintSpec
{
    VarId first = 0;
    VarId second = 0;
    std::vector<std::pair<Value, Value>> allowed;
};

/// One entry of a variable's constraint adjacency list.
struct Arc
{
    VarId other = 0;
    std::uint32_t relation = 0;
    bool row_side = true; // this variable indexes the relation's rows
};

class Instance
{
public:
    Instance() = default;

    /// Domains are value lists; a value v makes the domain bound at least v+1
    /// and unlisted values below the bound start out removed. Pairs without a
    /// listed constraint are unconstrained.
    static auto make(const std::vector<std::vector<Value>> & domains, const std::vector<ConstraintSpec> & constraints) -> Instance
    {
        Instance inst;
        auto n = domains.size();
        inst.bound_.resize(n);
        inst.live_.resize(n);
        inst.live_count_.assign(n, 0);
        inst.active_.assign(n, 1);
        inst.active_count_ = n;
        inst.adjacency_.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
            if (domains[v].empty())
                throw InputError("variable " + std::to_string(v) + " has an empty domain");
            Value bound = *std::max_element(domains[v].begin(), domains[v].end()) + 1;
            inst.bound_[v] = bound;
            inst.live_[v].assign(bound, 0);
            for (auto a : domains[v]) {
                if (inst.live_[v][a])
                    throw InputError("variable " + std::to_string(v) + " lists value " + std::to_string(a) + " twice");
                inst.live_[v][a] = 1;
                ++inst.live_count_[v];
            }
        }

        for (const auto & c : constraints) {
            if (c.first >= n || c.second >= n)
                throw InputError("constraint refers to an unknown variable");
            if (c.first == c.second)
                throw InputError("constraint on variable " + std::to_string(c.first) + " with itself");
            VarId lo = std::min(c.first, c.second), hi = std::max(c.first, c.second);
            if (inst.find_arc(lo, hi))
                throw InputError("duplicate constraint on pair " + std::to_string(lo) + " " + std::to_string(hi));
            Relation rel(inst.bound_[lo], inst.bound_[hi]);
            for (auto [a, b] : c.allowed) {
                if (c.first != lo)
                    std::swap(a, b);
                if (! inst.in_domain(lo, a) || ! inst.in_domain(hi, b))
                    throw InputError("tuple (" + std::to_string(a) + "," + std::to_string(b) + ") outside the domains of pair " +
                        std::to_string(lo) + " " + std::to_string(hi));
                rel.allow(a, b);
            }
            inst.add_relation(lo, hi, std::move(rel));
        }
        return inst;
    }

    auto var_count() const -> std::size_t { return bound_.size(); }
    auto active_count() const -> std::size_t { return active_count_; }
    auto is_active(VarId v) const -> bool { return active_[v] != 0; }

    /// Active variables, ascending.
    auto active_vars() const -> std::vector<VarId>
    {
        std::vector<VarId> result;
        for (VarId v = 0; v < var_count(); ++v)
            if (active_[v])
                result.push_back(v);
        return result;
    }

    auto domain_bound(VarId v) const -> Value { return bound_[v]; }
    auto domain_size(VarId v) const -> std::size_t { return live_count_[v]; }
    auto in_domain(VarId v, Value a) const -> bool { return a < bound_[v] && live_[v][a]; }

    /// Live values of v, ascending.
    auto domain(VarId v) const -> std::vector<Value>
    {
        std::vector<Value> result;
        result.reserve(live_count_[v]);
        for (Value a = 0; a < bound_[v]; ++a)
            if (live_[v][a])
                result.push_back(a);
        return result;
    }

    auto max_domain_size() const -> std::size_t
    {
        std::size_t d = 0;
        for (VarId v = 0; v < var_count(); ++v)
            if (active_[v])
                d = std::max(d, live_count_[v]);
        return d;
    }

    /// Variables sharing a stored constraint with v (active or not), ascending.
    auto arcs(VarId v) const -> std::span<const Arc> { return adjacency_[v]; }

    auto find_arc(VarId v, VarId w) const -> const Arc *
    {
        const auto & adj = adjacency_[v];
        auto it = std::lower_bound(adj.begin(), adj.end(), w, [](const Arc & arc, VarId key) { return arc.other < key; });
        return it != adj.end() && it->other == w ? &*it : nullptr;
    }

    /// Compatibility through a known arc: `mine` belongs to the arc's owner.
    auto compatible(const Arc & arc, Value mine, Value theirs) const -> bool
    {
        const auto & rel = relations_[arc.relation];
        return arc.row_side ? rel.allows(mine, theirs) : rel.allows(theirs, mine);
    }

    auto compatible(Assignment p, Assignment q) const -> bool
    {
        if (p.var == q.var)
            throw ContractViolation("compatibility queried between two assignments of variable " + std::to_string(p.var));
        if (p.var >= var_count() || q.var >= var_count() || p.val >= bound_[p.var] || q.val >= bound_[q.var])
            throw ContractViolation("compatibility queried for an assignment outside the instance");
        auto arc = find_arc(p.var, q.var);
        return arc ? compatible(*arc, p.val, q.val) : true;
    }

    auto relation_count() const -> std::size_t { return relations_.size(); }

    void remove_value(VarId v, Value a)
    {
        if (! in_domain(v, a))
            throw ContractViolation("removing value " + std::to_string(a) + " not in the domain of variable " + std::to_string(v));
        live_[v][a] = 0;
        --live_count_[v];
    }

    void restore_value(VarId v, Value a)
    {
        if (a >= bound_[v] || live_[v][a])
            throw ContractViolation("restoring value " + std::to_string(a) + " that is not removed from variable " + std::to_string(v));
        live_[v][a] = 1;
        ++live_count_[v];
    }

    void deactivate(VarId v)
    {
        if (! active_[v])
            throw ContractViolation("variable " + std::to_string(v) + " is already eliminated");
        active_[v] = 0;
        --active_count_;
    }

    void activate(VarId v)
    {
        if (active_[v])
            throw ContractViolation("variable " + std::to_string(v) + " is already active");
        active_[v] = 1;
        ++active_count_;
    }

    /// Same variables, same live domains, same compatibilities between live
    /// assignments of active variables.
    friend auto operator==(const Instance & a, const Instance & b) -> bool
    {
        if (a.var_count() != b.var_count() || a.active_ != b.active_)
            return false;
        for (VarId v = 0; v < a.var_count(); ++v)
            if (a.domain(v) != b.domain(v))
                return false;
        for (VarId v = 0; v < a.var_count(); ++v)
            for (VarId w = v + 1; w < a.var_count(); ++w) {
                if (! a.is_active(v) || ! a.is_active(w))
                    continue;
                for (auto x : a.domain(v))
                    for (auto y : a.domain(w))
                        if (a.compatible({v, x}, {w, y}) != b.compatible({v, x}, {w, y}))
                            return false;
            }
        return true;
    }

private:
    void add_relation(VarId lo, VarId hi, Relation rel)
    {
        auto index = std::uint32_t(relations_.size());
        relations_.push_back(std::move(rel));
        auto insert = [](std::vector<Arc> & adj, Arc arc) {
            auto it = std::lower_bound(adj.begin(), adj.end(), arc.other, [](const Arc & a, VarId key) { return a.other < key; });
            adj.insert(it, arc);
        };
        insert(adjacency_[lo], Arc{hi, index, true});
        insert(adjacency_[hi], Arc{lo, index, false});
    }

    std::vector<Value> bound_;
    std::vector<std::vector<std::uint8_t>> live_;
    std::vector<std::size_t> live_count_;
    std::vector<std::uint8_t> active_;
    std::size_t active_count_ = 0;
    std::vector<Relation> relations_;
    std::vector<std::vector<Arc>> adjacency_;
};

inline auto make_instance(const std::vector<std::vector<Value>> & domains, const std::vector<ConstraintSpec> & constraints) -> Instance
{
    return Instance::make(domains, constraints);
}

inline auto is_compatible(const Instance & inst, Assignment p, Assignment q) -> bool { return inst.compatible(p, q); }

/// Every assigned variable is active with a live value, and every pair of
/// assigned variables is compatible.
inline auto is_partial_solution(const Instance & inst, const PartialAssignment & s) -> bool
{
    if (s.size() > inst.var_count())
        return false;
    std::vector<VarId> assigned;
    for (VarId v = 0; v < s.size(); ++v) {
        if (! s[v])
            continue;
        if (! inst.is_active(v) || ! inst.in_domain(v, *s[v]))
            return false;
        assigned.push_back(v);
    }
    for (auto v : assigned)
        for (const auto & arc : inst.arcs(v))
            if (arc.other > v && arc.other < s.size() && s[arc.other] && inst.is_active(arc.other) &&
                ! inst.compatible(arc, *s[v], *s[arc.other]))
                return false;
    return true;
}

/// A partial solution assigning exactly the active variables.
inline auto is_solution(const Instance & inst, const PartialAssignment & s) -> bool
{
    if (s.size() != inst.var_count())
        return false;
    for (VarId v = 0; v < s.size(); ++v)
        if (inst.is_active(v) != s[v].has_value())
            return false;
    return is_partial_solution(inst, s);
}

/// Pairs of active variables whose relation, restricted to the live domains,
/// forbids at least one pair.
inline auto nontrivial_constraint_count(const Instance & inst) -> std::size_t
{
    std::size_t count = 0;
    for (VarId v = 0; v < inst.var_count(); ++v) {
        if (! inst.is_active(v))
            continue;
        for (const auto & arc : inst.arcs(v)) {
            if (arc.other < v || ! inst.is_active(arc.other))
                continue;
            bool trivial = true;
            for (auto a : inst.domain(v)) {
                for (auto b : inst.domain(arc.other))
                    if (! inst.compatible(arc, a, b)) {
                        trivial = false;
                        break;
                    }
                if (! trivial)
                    break;
            }
            if (! trivial)
                ++count;
        }
    }
    return count;
}

/// Partial compatibility structure with optional quantification.
class Pattern
{
public:
    using Edge = std::pair<Assignment, Assignment>;

    Pattern() = default;

    explicit Pattern(std::vector<std::vector<Value>> domains) : domains_(std::move(domains))
    {
        for (auto & d : domains_) {
            std::sort(d.begin(), d.end());
            d.erase(std::unique(d.begin(), d.end()), d.end());
        }
    }

    auto var_count() const -> std::size_t { return domains_.size(); }
    auto domain(VarId v) const -> const std::vector<Value> & { return domains_[v]; }
    auto has_value(VarId v, Value a) const -> bool
    {
        return v < domains_.size() && std::binary_search(domains_[v].begin(), domains_[v].end(), a);
    }
    auto assignment_count() const -> std::size_t
    {
        std::size_t count = 0;
        for (const auto & d : domains_)
            count += d.size();
        return count;
    }

    static auto edge_key(Assignment p, Assignment q) -> Edge { return p < q ? Edge{p, q} : Edge{q, p}; }

    auto cpt(Assignment p, Assignment q) const -> std::optional<bool>
    {
        auto it = cpt_.find(edge_key(p, q));
        if (it == cpt_.end())
            return std::nullopt;
        return it->second;
    }

    void set_cpt(Assignment p, Assignment q, bool compatible)
    {
        if (p.var == q.var)
            throw ContractViolation("pattern edge between two assignments of variable " + std::to_string(p.var));
        if (! has_value(p.var, p.val) || ! has_value(q.var, q.val))
            throw ContractViolation("pattern edge on an assignment outside the pattern");
        cpt_[edge_key(p, q)] = compatible;
    }

    void erase_cpt(Assignment p, Assignment q) { cpt_.erase(edge_key(p, q)); }

    auto edges() const -> const std::map<Edge, bool> & { return cpt_; }

    auto distinguished_var() const -> std::optional<VarId> { return distinguished_var_; }
    auto existential() const -> const std::vector<Value> & { return existential_; }
    auto is_existential(Value a) const -> bool { return std::binary_search(existential_.begin(), existential_.end(), a); }
    auto distinguished_val() const -> std::optional<Value> { return distinguished_val_; }

    /// Makes the pattern quantified on `v`.
    void quantify(VarId v, std::vector<Value> existential = {}, std::optional<Value> distinguished = std::nullopt)
    {
        std::sort(existential.begin(), existential.end());
        existential.erase(std::unique(existential.begin(), existential.end()), existential.end());
        if (v >= var_count())
            throw ContractViolation("distinguished variable outside the pattern");
        for (auto a : existential)
            if (! has_value(v, a))
                throw ContractViolation("existential value outside the distinguished variable's domain");
        if (distinguished && ! std::binary_search(existential.begin(), existential.end(), *distinguished))
            throw ContractViolation("distinguished value must be existential");
        distinguished_var_ = v;
        existential_ = std::move(existential);
        distinguished_val_ = distinguished;
    }

    void unquantify()
    {
        distinguished_var_.reset();
        existential_.clear();
        distinguished_val_.reset();
    }

    /// Drops assignment p and every edge touching it. The caller keeps the
    /// quantification fields consistent.
    void remove_assignment(Assignment p)
    {
        auto & d = domains_[p.var];
        d.erase(std::remove(d.begin(), d.end(), p.val), d.end());
        std::erase_if(cpt_, [&](const auto & entry) { return entry.first.first == p || entry.first.second == p; });
        if (distinguished_var_ && *distinguished_var_ == p.var) {
            std::erase(existential_, p.val);
            if (distinguished_val_ == p.val)
                distinguished_val_.reset();
        }
    }

    /// Checks the structural invariants; throws ContractViolation.
    void validate() const
    {
        for (VarId v = 0; v < var_count(); ++v)
            if (domains_[v].empty())
                throw ContractViolation("pattern variable " + std::to_string(v) + " has an empty domain");
        for (const auto & [edge, value] : cpt_) {
            if (edge.first.var == edge.second.var)
                throw ContractViolation("pattern edge inside one variable");
            if (! has_value(edge.first.var, edge.first.val) || ! has_value(edge.second.var, edge.second.val))
                throw ContractViolation("pattern edge on a missing assignment");
        }
        if (! distinguished_var_ && (! existential_.empty() || distinguished_val_))
            throw ContractViolation("existential values without a distinguished variable");
    }

    friend auto operator==(const Pattern &, const Pattern &) -> bool = default;

private:
    std::vector<std::vector<Value>> domains_;
    std::map<Edge, bool> cpt_;
    std::optional<VarId> distinguished_var_;
    std::vector<Value> existential_;
    std::optional<Value> distinguished_val_;
};

} // namespace cspprune
