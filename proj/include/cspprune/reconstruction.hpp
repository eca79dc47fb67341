#pragma once

// Solutions of the original instance from solutions of the reduced one.
//
// Both recover functions replay the trace forward on a private copy of the
// original instance, then walk it backwards undoing each record, so every
// variable elimination is reversed against the exact instance it was
// performed on.

#include <cspprune/engine.hpp>
#include <cspprune/io.hpp>
#include <cspprune/model.hpp>
#include <cspprune/oracle.hpp>
#include <cspprune/trace.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

namespace cspprune {

/// The reconstruction hit a state the elimination theory rules out.
class SoundnessFailure : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

struct ExtensionContext
{
    std::vector<VarId> y;    // active variables whose current value is compatible with (x, d)
    std::vector<VarId> ybar; // the others
    std::vector<Value> t;    // per ybar entry: least value compatible with (x, d)
};

namespace detail {

    inline auto compatible_with_all(const Instance & inst, VarId x, Value d, const PartialAssignment & s) -> bool
    {
        for (const auto & arc : inst.arcs(x))
            if (inst.is_active(arc.other) && ! inst.compatible(arc, d, *s[arc.other]))
                return false;
        return true;
    }

} // namespace detail

/// Extends s (a solution once x is removed) by the least compatible value of
/// x. `inst` is the instance as it was before x was eliminated.
inline auto extend_btp(const Instance & inst, VarId x, PartialAssignment s) -> Solution
{
    s.resize(inst.var_count());
    for (auto d : inst.domain(x))
        if (detail::compatible_with_all(inst, x, d, s)) {
            s[x] = d;
            return s;
        }
    throw SoundnessFailure("no value of variable " + std::to_string(x) + " extends the solution");
}

inline auto extension_context(const Instance & inst, VarId x, const PartialAssignment & s, Value d) -> ExtensionContext
{
    ExtensionContext ctx;
    std::vector<std::uint8_t> against(inst.var_count(), 0);
    for (const auto & arc : inst.arcs(x))
        if (inst.is_active(arc.other) && ! inst.compatible(arc, d, *s[arc.other]))
            against[arc.other] = 1;
    for (auto v : inst.active_vars()) {
        if (v == x)
            continue;
        if (! against[v]) {
            ctx.y.push_back(v);
            continue;
        }
        ctx.ybar.push_back(v);
        const Arc * arc = inst.find_arc(x, v);
        std::optional<Value> t;
        for (auto value : inst.domain(v))
            if (inst.compatible(*arc, d, value)) {
                t = value;
                break;
            }
        if (! t)
            throw SoundnessFailure("value " + std::to_string(d) + " of variable " + std::to_string(x) + " has no support at variable " +
                std::to_string(v));
        ctx.t.push_back(*t);
    }
    return ctx;
}

/// s' = d at x, s on Y, t on Ybar. Assignments of Ybar variables change.
inline auto extend_via_t(const Instance & inst, VarId x, PartialAssignment s, Value d) -> Solution
{
    s.resize(inst.var_count());
    auto ctx = extension_context(inst, x, s, d);
    for (std::size_t i = 0; i < ctx.ybar.size(); ++i)
        s[ctx.ybar[i]] = ctx.t[i];
    s[x] = d;
    return s;
}

namespace detail {

    // Applies every record to a copy of the original; returns the reduced state.
    inline auto replay_forward(const Instance & original, const EliminationTrace & trace) -> Instance
    {
        if (original.active_count() != original.var_count())
            throw ContractViolation("the original instance must not have eliminated variables");
        if (fingerprint(original) != trace.fingerprint)
            throw ContractViolation("trace does not belong to this instance (fingerprint mismatch)");
        Instance inst = original;
        for (const auto & r : trace.records) {
            if (r.var >= inst.var_count())
                throw ContractViolation("trace names an unknown variable");
            if (r.kind == RecordKind::var)
                inst.deactivate(r.var);
            else
                inst.remove_value(r.var, *r.val);
        }
        return inst;
    }

    inline void undo(Instance & inst, const ElimRecord & r)
    {
        if (r.kind == RecordKind::var)
            inst.activate(r.var);
        else
            inst.restore_value(r.var, *r.val);
    }

} // namespace detail

/// A solution of the original instance from a solution s of the reduced one.
inline auto recover_one(const Instance & original, const EliminationTrace & trace, const Solution & s) -> Solution
{
    Instance inst = detail::replay_forward(original, trace);
    if (! is_solution(inst, s))
        throw ContractViolation("the given assignment does not solve the reduced instance");
    Solution current = s;
    for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it) {
        detail::undo(inst, *it);
        if (it->kind != RecordKind::var)
            continue;
        switch (*it->rule) {
        case Rule::BTP:
        case Rule::ExistsSubBTP: current = extend_btp(inst, it->var, std::move(current)); break;
        case Rule::ExistsInvSubBTP:
        case Rule::ExistsSnake: {
            auto d = it->mapping.at(0);
            if (! inst.in_domain(it->var, d))
                throw ContractViolation("trace mapping refers to a removed value");
            current = extend_via_t(inst, it->var, std::move(current), d);
            break;
        }
        default: throw ContractViolation("var record with a value rule");
        }
    }
    return current;
}

/// All solutions of the original instance from all solutions of the reduced
/// one. Only BTP, ExistsSubBTP, NS and Exists2Triangle traces are accepted,
/// and Exists2Triangle only where at least 3 variables were active.
inline auto recover_all(const Instance & original, const EliminationTrace & trace, const SolutionSet & reduced_solutions) -> SolutionSet
{
    for (const auto & r : trace.records)
        if (r.rule && (*r.rule == Rule::ExistsInvSubBTP || *r.rule == Rule::ExistsSnake || *r.rule == Rule::Exists2InvSubBTP ||
                          *r.rule == Rule::Exists2Snake))
            throw ContractViolation("recover_all cannot reverse rule " + std::string(rule_name(*r.rule)));
    Instance inst = detail::replay_forward(original, trace);
    std::set<Solution> current;
    for (const auto & s : reduced_solutions) {
        if (! is_solution(inst, s))
            throw ContractViolation("a given assignment does not solve the reduced instance");
        current.insert(s);
    }
    for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it) {
        detail::undo(inst, *it);
        const auto & r = *it;
        if (r.kind == RecordKind::var) {
            std::set<Solution> next;
            for (auto s : current) {
                s.resize(inst.var_count());
                for (auto d : inst.domain(r.var))
                    if (detail::compatible_with_all(inst, r.var, d, s)) {
                        s[r.var] = d;
                        next.insert(s);
                    }
            }
            current = std::move(next);
        }
        else if (r.kind == RecordKind::val) {
            // Every solution using b maps onto one using the partner value.
            // For Exists2Triangle this needs a third active variable.
            if (*r.rule == Rule::Exists2Triangle && inst.active_count() < 3)
                throw ContractViolation("recover_all cannot reverse Exists2Triangle with fewer than 3 active variables");
            Value b = *r.val, partner = r.mapping.at(0);
            std::vector<Solution> variants;
            for (const auto & s : current)
                if (s[r.var] == partner) {
                    auto variant = s;
                    variant[r.var] = b;
                    if (detail::compatible_with_all(inst, r.var, b, variant))
                        variants.push_back(std::move(variant));
                }
            current.insert(variants.begin(), variants.end());
        }
    }
    return {current.begin(), current.end()};
}

/// Solves a preprocessed instance whose residual is trivial: at most one
/// active variable, or only singleton domains (arc consistency then makes
/// the single remaining assignment a solution).
inline auto greedy_solve(const Instance & original, const PreprocessResult & result) -> std::optional<Solution>
{
    if (result.unsatisfiable)
        return std::nullopt;
    const auto & reduced = result.reduced;
    auto active = reduced.active_vars();
    bool singletons = std::all_of(active.begin(), active.end(), [&](VarId v) { return reduced.domain_size(v) == 1; });
    if (active.size() > 1 && ! singletons)
        throw ContractViolation("residual instance is not trivial; use a search-based solver");
    Solution s(reduced.var_count());
    for (auto v : active)
        s[v] = reduced.domain(v).front();
    if (! is_solution(reduced, s))
        return std::nullopt;
    return recover_one(original, result.trace, s);
}

/// Preprocesses, solves the residual with the oracle, and reconstructs.
inline auto solve_with_preprocessing(const Instance & original, const EngineConfig & cfg = {}) -> std::optional<Solution>
{
    auto result = preprocess(original, cfg);
    if (result.unsatisfiable)
        return std::nullopt;
    auto s = solve(result.reduced);
    if (! s)
        return std::nullopt;
    return recover_one(original, result.trace, *s);
}

} // namespace cspprune
