#pragma once

// Brute-force ground truth. Everything here is deliberately naive: plain
// chronological backtracking for solutions and unpruned enumeration for
// pattern occurrence.

#include <cspprune/model.hpp>
#include <cspprune/pattern_algebra.hpp>

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cspprune {

using SolutionSet = std::vector<Solution>;

inline constexpr std::uint64_t default_node_limit = 20'000'000;

/// The node budget, overridable through CSPPRUNE_NODE_LIMIT.
inline auto oracle_node_limit() -> std::uint64_t
{
    if (const char * env = std::getenv("CSPPRUNE_NODE_LIMIT")) {
        try {
            auto value = std::stoull(env);
            if (value > 0)
                return value;
        }
        catch (const std::exception &) {
        }
    }
    return default_node_limit;
}

namespace detail {

    class Backtracker
    {
    public:
        Backtracker(const Instance & inst, std::uint64_t limit) : inst_(inst), limit_(limit)
        {
            vars_ = inst.active_vars();
            for (auto v : vars_)
                domains_.push_back(inst.domain(v));
            current_.assign(inst.var_count(), std::nullopt);
        }

        // Visits solutions in lexicographic order; the visitor returns false to stop.
        void run(const std::function<bool(const Solution &)> & visit)
        {
            visit_ = &visit;
            stopped_ = false;
            descend(0);
        }

    private:
        void descend(std::size_t depth)
        {
            if (depth == vars_.size()) {
                if (! (*visit_)(current_))
                    stopped_ = true;
                return;
            }
            VarId v = vars_[depth];
            for (auto a : domains_[depth]) {
                if (++nodes_ > limit_)
                    throw SizeLimitExceeded("oracle search exceeded " + std::to_string(limit_) + " nodes");
                if (! consistent(depth, v, a))
                    continue;
                current_[v] = a;
                descend(depth + 1);
                current_[v].reset();
                if (stopped_)
                    return;
            }
        }

        auto consistent(std::size_t depth, VarId v, Value a) const -> bool
        {
            for (std::size_t k = 0; k < depth; ++k) {
                VarId u = vars_[k];
                if (! inst_.compatible({u, *current_[u]}, {v, a}))
                    return false;
            }
            return true;
        }

        const Instance & inst_;
        std::uint64_t limit_;
        std::uint64_t nodes_ = 0;
        std::vector<VarId> vars_;
        std::vector<std::vector<Value>> domains_;
        Solution current_;
        const std::function<bool(const Solution &)> * visit_ = nullptr;
        bool stopped_ = false;
    };

} // namespace detail

/// The lexicographically least solution over the active variables.
inline auto solve(const Instance & inst, std::uint64_t limit = oracle_node_limit()) -> std::optional<Solution>
{
    std::optional<Solution> found;
    detail::Backtracker(inst, limit).run([&](const Solution & s) {
        found = s;
        return false;
    });
    return found;
}

inline auto count_solutions(const Instance & inst, std::uint64_t limit = oracle_node_limit()) -> std::uint64_t
{
    std::uint64_t count = 0;
    detail::Backtracker(inst, limit).run([&](const Solution &) {
        ++count;
        return true;
    });
    return count;
}

inline auto enumerate_solutions(const Instance & inst, std::uint64_t limit = oracle_node_limit()) -> SolutionSet
{
    SolutionSet all;
    detail::Backtracker(inst, limit).run([&](const Solution & s) {
        all.push_back(s);
        return true;
    });
    return all;
}

inline auto is_satisfiable(const Instance & inst, std::uint64_t limit = oracle_node_limit()) -> bool
{
    return solve(inst, limit).has_value();
}

namespace detail {

    // Enumerates every injective phi and every psi, then checks all edges.
    class BruteOccurrence
    {
    public:
        BruteOccurrence(const Pattern & p, const Instance & inst, std::optional<VarId> at, const ValueMapping & m, std::uint64_t limit) :
            p_(p), inst_(inst), at_(at), m_(m), limit_(limit)
        {
        }

        auto run() -> bool
        {
            if (p_.var_count() > inst_.active_count())
                return false;
            targets_ = inst_.active_vars();
            phi_.assign(p_.var_count(), 0);
            return choose_phi(0);
        }

    private:
        void tick()
        {
            if (++nodes_ > limit_)
                throw SizeLimitExceeded("brute-force occurrence exceeded its node budget");
        }

        auto choose_phi(VarId v) -> bool
        {
            if (v == p_.var_count()) {
                slots_.clear();
                for (VarId u = 0; u < p_.var_count(); ++u)
                    for (auto a : p_.domain(u))
                        slots_.push_back({u, a});
                psi_.assign(p_.var_count(), {});
                return choose_psi(0);
            }
            for (auto w : targets_) {
                bool used = false;
                for (VarId u = 0; u < v; ++u)
                    used = used || phi_[u] == w;
                if (used)
                    continue;
                phi_[v] = w;
                if (choose_phi(v + 1))
                    return true;
            }
            return false;
        }

        auto choose_psi(std::size_t index) -> bool
        {
            if (index == slots_.size()) {
                tick();
                return matches();
            }
            auto [v, a] = slots_[index];
            for (auto b : inst_.domain(phi_[v])) {
                psi_[v][a] = b;
                if (choose_psi(index + 1))
                    return true;
            }
            return false;
        }

        auto matches() const -> bool
        {
            if (at_) {
                VarId xv = *p_.distinguished_var();
                if (phi_[xv] != *at_)
                    return false;
                for (const auto & [a, d] : m_)
                    if (psi_[xv].at(a) != d)
                        return false;
            }
            for (const auto & [edge, value] : p_.edges()) {
                Assignment p1{phi_[edge.first.var], psi_[edge.first.var].at(edge.first.val)};
                Assignment p2{phi_[edge.second.var], psi_[edge.second.var].at(edge.second.val)};
                if (inst_.compatible(p1, p2) != value)
                    return false;
            }
            return true;
        }

        const Pattern & p_;
        const Instance & inst_;
        std::optional<VarId> at_;
        const ValueMapping & m_;
        std::uint64_t limit_;
        std::uint64_t nodes_ = 0;
        std::vector<VarId> targets_;
        std::vector<VarId> phi_;
        std::vector<Assignment> slots_;
        std::vector<std::map<Value, Value>> psi_;
    };

} // namespace detail

/// Naive occurrence test at x under m; same semantics as occurs_at.
inline auto brute_occurs(const Pattern & p, const Instance & inst, VarId x, const ValueMapping & m, std::uint64_t limit = oracle_node_limit())
    -> bool
{
    check_value_mapping(p, inst, x, m);
    return detail::BruteOccurrence(p, inst, x, m, limit).run();
}

/// Naive occurrence test anywhere, ignoring quantification.
inline auto brute_occurs_in(const Pattern & p, const Instance & inst, std::uint64_t limit = oracle_node_limit()) -> bool
{
    static const ValueMapping none;
    return detail::BruteOccurrence(p, inst, std::nullopt, none, limit).run();
}

} // namespace cspprune
