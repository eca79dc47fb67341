#pragma once

// Sub-patterns, merge and dangling reductions, equivalence, and occurrence.
//
// Occurrence comes in two forms. occurs_generic() follows the reduction
// definition literally: some reduction of P embeds injectively into Q.
// occurs_at() / occurs_in() search directly for a homomorphism into an
// instance (injective on variables, arbitrary on values); on arc-consistent
// instances the two agree, which the tests check.

#include <cspprune/model.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace cspprune {

/// Maps existential pattern values to values of the target variable.
using ValueMapping = std::map<Value, Value>;

struct OccurrenceWitness
{
    std::vector<VarId> phi;              // pattern variable -> instance variable
    std::vector<std::map<Value, Value>> psi; // per pattern variable: pattern value -> instance value
};

/// Identity-embedding sub-pattern test (variables and values keep their ids).
inline auto is_sub_pattern(const Pattern & sub, const Pattern & super) -> bool
{
    if (sub.var_count() > super.var_count())
        return false;
    for (VarId v = 0; v < sub.var_count(); ++v)
        for (auto a : sub.domain(v))
            if (! super.has_value(v, a))
                return false;
    for (const auto & [edge, value] : sub.edges()) {
        auto other = super.cpt(edge.first, edge.second);
        if (! other || *other != value)
            return false;
    }
    if (sub.distinguished_var()) {
        if (super.distinguished_var() != sub.distinguished_var())
            return false;
        for (auto a : sub.existential())
            if (! super.is_existential(a))
                return false;
    }
    if (sub.distinguished_val() && super.distinguished_val() != sub.distinguished_val())
        return false;
    return true;
}

/// Whether value a of v can be merged into value b. Order matters for
/// quantified patterns; the distinguished value is never merged away.
inline auto mergeable(const Pattern & p, VarId v, Value a, Value b) -> bool
{
    if (a == b || ! p.has_value(v, a) || ! p.has_value(v, b))
        return false;
    if (p.distinguished_var() == v) {
        if (p.is_existential(a) && ! p.is_existential(b))
            return false;
        if (p.distinguished_val() == a)
            return false;
    }
    for (VarId w = 0; w < p.var_count(); ++w) {
        if (w == v)
            continue;
        for (auto c : p.domain(w)) {
            auto with_a = p.cpt({v, a}, {w, c});
            auto with_b = p.cpt({v, b}, {w, c});
            if (with_a && with_b && *with_a != *with_b)
                return false;
        }
    }
    return true;
}

/// Merges a into b: b inherits a's edges wherever b's are undefined.
inline auto merge(const Pattern & p, VarId v, Value a, Value b) -> Pattern
{
    if (! mergeable(p, v, a, b))
        throw ContractViolation("values are not mergeable");
    Pattern result = p;
    for (VarId w = 0; w < p.var_count(); ++w) {
        if (w == v)
            continue;
        for (auto c : p.domain(w)) {
            auto with_a = p.cpt({v, a}, {w, c});
            if (with_a && ! p.cpt({v, b}, {w, c}))
                result.set_cpt({v, b}, {w, c}, *with_a);
        }
    }
    result.remove_assignment({v, a});
    return result;
}

inline auto defined_edge_count(const Pattern & p, Assignment a) -> std::size_t
{
    std::size_t count = 0;
    for (const auto & [edge, value] : p.edges())
        if (edge.first == a || edge.second == a)
            ++count;
    return count;
}

/// At most one defined edge, which must be a compatibility, and not an
/// existential assignment of the distinguished variable.
inline auto is_dangling(const Pattern & p, Assignment a) -> bool
{
    if (! p.has_value(a.var, a.val))
        return false;
    if (p.distinguished_var() == a.var && p.is_existential(a.val))
        return false;
    std::size_t count = 0;
    for (const auto & [edge, value] : p.edges())
        if (edge.first == a || edge.second == a) {
            if (! value || ++count > 1)
                return false;
        }
    return true;
}

/// Dangling and removable without emptying the variable's domain.
inline auto is_removable_dangling(const Pattern & p, Assignment a) -> bool
{
    return is_dangling(p, a) && p.domain(a.var).size() > 1;
}

inline auto dangling_reduce(const Pattern & p, Assignment a) -> Pattern
{
    if (! is_dangling(p, a))
        throw ContractViolation("assignment is not dangling");
    if (p.domain(a.var).size() < 2)
        throw ContractViolation("dangling reduction would empty a domain");
    Pattern result = p;
    result.remove_assignment(a);
    return result;
}

inline auto is_irreducible(const Pattern & p) -> bool
{
    for (VarId v = 0; v < p.var_count(); ++v)
        for (auto a : p.domain(v)) {
            if (is_removable_dangling(p, {v, a}))
                return false;
            for (auto b : p.domain(v))
                if (mergeable(p, v, a, b))
                    return false;
        }
    return true;
}

namespace detail {

    // Backtracking search for an injective map of `from` into `to` that
    // preserves every defined edge and the quantification fields. With
    // `bijective` set it becomes an isomorphism test.
    class EmbeddingSearch
    {
    public:
        EmbeddingSearch(const Pattern & from, const Pattern & to, bool bijective, std::size_t node_limit) :
            from_(from), to_(to), bijective_(bijective), node_limit_(node_limit)
        {
        }

        auto run() -> bool
        {
            if (! header_compatible())
                return false;
            order_.clear();
            if (from_.distinguished_var())
                order_.push_back(*from_.distinguished_var());
            for (VarId v = 0; v < from_.var_count(); ++v)
                if (from_.distinguished_var() != v)
                    order_.push_back(v);
            phi_.assign(from_.var_count(), 0);
            used_var_.assign(to_.var_count(), 0);
            psi_.assign(from_.var_count(), {});
            return assign_var(0);
        }

    private:
        auto header_compatible() const -> bool
        {
            if (from_.var_count() > to_.var_count())
                return false;
            if (from_.distinguished_var() && ! to_.distinguished_var())
                return false;
            if (from_.distinguished_val() && ! to_.distinguished_val())
                return false;
            if (from_.existential().size() > to_.existential().size())
                return false;
            if (bijective_) {
                if (from_.var_count() != to_.var_count() || from_.edges().size() != to_.edges().size() ||
                    from_.assignment_count() != to_.assignment_count() ||
                    from_.distinguished_var().has_value() != to_.distinguished_var().has_value() ||
                    from_.distinguished_val().has_value() != to_.distinguished_val().has_value() ||
                    from_.existential().size() != to_.existential().size())
                    return false;
            }
            return true;
        }

        void tick()
        {
            if (++nodes_ > node_limit_)
                throw SizeLimitExceeded("pattern embedding search exceeded its node budget");
        }

        auto assign_var(std::size_t depth) -> bool
        {
            if (depth == order_.size())
                return true;
            VarId v = order_[depth];
            for (VarId w = 0; w < to_.var_count(); ++w) {
                if (used_var_[w])
                    continue;
                if (from_.distinguished_var() == v && to_.distinguished_var() != w)
                    continue;
                if (bijective_ && to_.distinguished_var() == w && from_.distinguished_var() != v)
                    continue;
                auto from_size = from_.domain(v).size(), to_size = to_.domain(w).size();
                if (bijective_ ? from_size != to_size : from_size > to_size)
                    continue;
                tick();
                used_var_[w] = 1;
                phi_[v] = w;
                if (assign_values(depth, 0))
                    return true;
                used_var_[w] = 0;
            }
            return false;
        }

        auto assign_values(std::size_t depth, std::size_t index) -> bool
        {
            VarId v = order_[depth];
            const auto & values = from_.domain(v);
            if (index == values.size())
                return assign_var(depth + 1);
            Value a = values[index];
            VarId w = phi_[v];
            bool distinguished = from_.distinguished_var() == v;
            for (auto b : to_.domain(w)) {
                bool taken = false;
                for (const auto & [from_val, to_val] : psi_[v])
                    if (to_val == b)
                        taken = true;
                if (taken)
                    continue;
                if (distinguished) {
                    bool e_from = from_.is_existential(a), e_to = to_.is_existential(b);
                    if (e_from && ! e_to)
                        continue;
                    if (bijective_ && e_from != e_to)
                        continue;
                    bool d_from = from_.distinguished_val() == a, d_to = to_.distinguished_val() == b;
                    if (d_from && ! d_to)
                        continue;
                    if (bijective_ && d_from != d_to)
                        continue;
                }
                tick();
                if (! edges_agree(depth, v, a, b))
                    continue;
                psi_[v][a] = b;
                if (assign_values(depth, index + 1))
                    return true;
                psi_[v].erase(a);
            }
            return false;
        }

        auto edges_agree(std::size_t depth, VarId v, Value a, Value b) const -> bool
        {
            for (std::size_t k = 0; k < depth; ++k) {
                VarId u = order_[k];
                for (const auto & [c, image] : psi_[u]) {
                    auto mine = from_.cpt({v, a}, {u, c});
                    auto theirs = to_.cpt({phi_[v], b}, {phi_[u], image});
                    if (mine && theirs != mine)
                        return false;
                    if (bijective_ && theirs && ! mine)
                        return false;
                }
            }
            return true;
        }

        const Pattern & from_;
        const Pattern & to_;
        bool bijective_;
        std::size_t node_limit_;
        std::size_t nodes_ = 0;
        std::vector<VarId> order_;
        std::vector<VarId> phi_;
        std::vector<std::uint8_t> used_var_;
        std::vector<std::map<Value, Value>> psi_;
    };

    inline constexpr std::size_t default_pattern_node_limit = 20'000'000;

} // namespace detail

/// Isomorphic up to injective renaming of variables and values, preserving
/// domains, compatibilities and quantification.
inline auto equivalent(const Pattern & p, const Pattern & q) -> bool
{
    return detail::EmbeddingSearch(p, q, true, detail::default_pattern_node_limit).run();
}

/// p is equivalent to some sub-pattern of q.
inline auto embeds(const Pattern & p, const Pattern & q, std::size_t node_limit = detail::default_pattern_node_limit) -> bool
{
    return detail::EmbeddingSearch(p, q, false, node_limit).run();
}

/// All patterns reachable from p by merge and dangling reductions (p
/// included), one representative per equivalence class.
inline auto reduction_closure(const Pattern & p, std::size_t limit = 10'000) -> std::vector<Pattern>
{
    std::vector<Pattern> closure{p};
    auto seen = [&](const Pattern & candidate) {
        return std::any_of(closure.begin(), closure.end(), [&](const Pattern & known) { return equivalent(known, candidate); });
    };
    for (std::size_t next = 0; next < closure.size(); ++next) {
        Pattern current = closure[next];
        std::vector<Pattern> successors;
        for (VarId v = 0; v < current.var_count(); ++v)
            for (auto a : current.domain(v)) {
                if (is_removable_dangling(current, {v, a}))
                    successors.push_back(dangling_reduce(current, {v, a}));
                for (auto b : current.domain(v))
                    if (mergeable(current, v, a, b))
                        successors.push_back(merge(current, v, a, b));
            }
        for (auto & s : successors)
            if (! seen(s)) {
                if (closure.size() >= limit)
                    throw SizeLimitExceeded("reduction closure exceeds its size limit");
                closure.push_back(std::move(s));
            }
    }
    return closure;
}

/// Some reduction of p is equivalent to a sub-pattern of q.
inline auto occurs_generic(const Pattern & p, const Pattern & q, std::size_t assignment_limit = 16) -> bool
{
    if (p.assignment_count() > assignment_limit)
        throw SizeLimitExceeded("pattern too large for generic occurrence");
    for (const auto & reduced : reduction_closure(p))
        if (embeds(reduced, q))
            return true;
    return false;
}

/// The instance as a total pattern, quantified at x with the given
/// existential and distinguished values. Only live values of active
/// variables are kept; variable ids are preserved, so eliminated variables
/// become empty-domain placeholders and the result is only meaningful on
/// instances without eliminations.
inline auto instance_as_pattern(const Instance & inst, std::optional<VarId> x = std::nullopt, std::vector<Value> existential = {},
    std::optional<Value> distinguished = std::nullopt) -> Pattern
{
    std::vector<std::vector<Value>> domains;
    for (VarId v = 0; v < inst.var_count(); ++v)
        domains.push_back(inst.domain(v));
    Pattern p(domains);
    for (VarId v = 0; v < inst.var_count(); ++v)
        for (VarId w = v + 1; w < inst.var_count(); ++w)
            for (auto a : inst.domain(v))
                for (auto b : inst.domain(w))
                    p.set_cpt({v, a}, {w, b}, inst.compatible({v, a}, {w, b}));
    if (x)
        p.quantify(*x, std::move(existential), distinguished);
    return p;
}

namespace detail {

    // Homomorphism search into an instance: variables injectively onto
    // active variables, values arbitrarily onto live values.
    class OccurrenceSearch
    {
    public:
        OccurrenceSearch(const Pattern & pattern, const Instance & inst, std::optional<VarId> at, const ValueMapping & mapping) :
            pattern_(pattern), inst_(inst), at_(at), mapping_(mapping)
        {
        }

        auto run() -> std::optional<OccurrenceWitness>
        {
            if (pattern_.var_count() > inst_.active_count())
                return std::nullopt;
            order_.clear();
            if (at_)
                order_.push_back(*pattern_.distinguished_var());
            for (VarId v = 0; v < pattern_.var_count(); ++v)
                if (! at_ || *pattern_.distinguished_var() != v)
                    order_.push_back(v);
            witness_.phi.assign(pattern_.var_count(), 0);
            witness_.psi.assign(pattern_.var_count(), {});
            used_.assign(inst_.var_count(), 0);
            targets_ = inst_.active_vars();
            if (assign_var(0))
                return witness_;
            return std::nullopt;
        }

    private:
        auto assign_var(std::size_t depth) -> bool
        {
            if (depth == order_.size())
                return true;
            VarId v = order_[depth];
            for (auto w : targets_) {
                if (used_[w])
                    continue;
                if (depth == 0 && at_ && w != *at_)
                    continue;
                used_[w] = 1;
                witness_.phi[v] = w;
                if (assign_values(depth, 0))
                    return true;
                used_[w] = 0;
            }
            return false;
        }

        auto assign_values(std::size_t depth, std::size_t index) -> bool
        {
            VarId v = order_[depth];
            const auto & values = pattern_.domain(v);
            if (index == values.size())
                return assign_var(depth + 1);
            Value a = values[index];
            VarId w = witness_.phi[v];
            auto try_value = [&](Value b) {
                if (! consistent(depth, v, a, b))
                    return false;
                witness_.psi[v][a] = b;
                if (assign_values(depth, index + 1))
                    return true;
                witness_.psi[v].erase(a);
                return false;
            };
            if (at_ && depth == 0 && pattern_.is_existential(a)) {
                auto it = mapping_.find(a);
                return try_value(it->second);
            }
            for (Value b = 0; b < inst_.domain_bound(w); ++b)
                if (inst_.in_domain(w, b) && try_value(b))
                    return true;
            return false;
        }

        auto consistent(std::size_t depth, VarId v, Value a, Value b) const -> bool
        {
            for (std::size_t k = 0; k < depth; ++k) {
                VarId u = order_[k];
                for (const auto & [c, image] : witness_.psi[u]) {
                    auto edge = pattern_.cpt({v, a}, {u, c});
                    if (edge && inst_.compatible({witness_.phi[v], b}, {witness_.phi[u], image}) != *edge)
                        return false;
                }
            }
            return true;
        }

        const Pattern & pattern_;
        const Instance & inst_;
        std::optional<VarId> at_;
        const ValueMapping & mapping_;
        std::vector<VarId> order_;
        std::vector<VarId> targets_;
        std::vector<std::uint8_t> used_;
        OccurrenceWitness witness_;
    };

} // namespace detail

/// Throws unless m is an injective map from e(p) onto live values of x.
inline void check_value_mapping(const Pattern & p, const Instance & inst, VarId x, const ValueMapping & m)
{
    if (! p.distinguished_var())
        throw ContractViolation("occurrence at a variable needs a quantified pattern");
    if (x >= inst.var_count() || ! inst.is_active(x))
        throw ContractViolation("occurrence target variable is not active");
    if (m.size() != p.existential().size())
        throw ContractViolation("value mapping must cover exactly the existential values");
    std::vector<Value> images;
    for (const auto & [from, to] : m) {
        if (! p.is_existential(from))
            throw ContractViolation("value mapping has a non-existential key");
        if (! inst.in_domain(x, to))
            throw ContractViolation("value mapping image outside the domain of the target variable");
        images.push_back(to);
    }
    std::sort(images.begin(), images.end());
    if (std::adjacent_find(images.begin(), images.end()) != images.end())
        throw ContractViolation("value mapping is not injective");
}

/// Occurrence of a quantified pattern at variable x with existential values
/// fixed by m. Returns the lexicographically first witness.
inline auto occurs_at(const Pattern & p, const Instance & inst, VarId x, const ValueMapping & m) -> std::optional<OccurrenceWitness>
{
    check_value_mapping(p, inst, x, m);
    return detail::OccurrenceSearch(p, inst, x, m).run();
}

/// Occurrence anywhere in the instance; quantification is ignored.
inline auto occurs_in(const Pattern & p, const Instance & inst) -> std::optional<OccurrenceWitness>
{
    static const ValueMapping none;
    return detail::OccurrenceSearch(p, inst, std::nullopt, none).run();
}

/// Independent re-check of a witness.
inline auto verify_witness(const Pattern & p, const Instance & inst, const OccurrenceWitness & w, std::optional<VarId> x = std::nullopt,
    const ValueMapping & m = {}) -> bool
{
    if (w.phi.size() != p.var_count() || w.psi.size() != p.var_count())
        return false;
    for (VarId v = 0; v < p.var_count(); ++v) {
        if (! inst.is_active(w.phi[v]))
            return false;
        for (VarId u = 0; u < v; ++u)
            if (w.phi[u] == w.phi[v])
                return false;
        for (auto a : p.domain(v)) {
            auto it = w.psi[v].find(a);
            if (it == w.psi[v].end() || ! inst.in_domain(w.phi[v], it->second))
                return false;
        }
    }
    if (x) {
        auto xv = *p.distinguished_var();
        if (w.phi[xv] != *x)
            return false;
        for (const auto & [a, d] : m)
            if (w.psi[xv].at(a) != d)
                return false;
    }
    for (const auto & [edge, value] : p.edges()) {
        Assignment p1{w.phi[edge.first.var], w.psi[edge.first.var].at(edge.first.val)};
        Assignment p2{w.phi[edge.second.var], w.psi[edge.second.var].at(edge.second.val)};
        if (inst.compatible(p1, p2) != value)
            return false;
    }
    return true;
}

} // namespace cspprune
