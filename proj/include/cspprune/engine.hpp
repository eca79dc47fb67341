#pragma once

// Variable and value elimination by forbidden patterns.
//
// Each rule has a straight-line detector answering "does the rule's pattern
// occur at x under this value mapping?". The generic occurs_at() search in
// pattern_algebra.hpp computes the same thing and serves as the reference
// in tests.
//
// Pattern values are named as in the catalog: a = 0 and b = 1 on x. A
// var-elim mapping is {0 -> d} (empty for BTP); a val-elim mapping is
// {0 -> d, 1 -> b}, where b is the value being removed.

#include <cspprune/arc_consistency.hpp>
#include <cspprune/io.hpp>
#include <cspprune/model.hpp>
#include <cspprune/trace.hpp>

#include <optional>
#include <vector>

namespace cspprune {

namespace detail {

    class Detector
    {
    public:
        Detector(const Instance & inst, VarId x) : inst_(inst), x_(x) {}

        auto btp() const -> bool
        {
            auto dx = inst_.domain(x_);
            for (VarId y : neighbours(x_)) {
                for (auto c : inst_.domain(y)) {
                    std::vector<Value> against, with;
                    for (auto a : dx)
                        (compat(y, c, x_, a) ? with : against).push_back(a);
                    if (against.empty() || with.empty())
                        continue;
                    for (VarId z : neighbours(x_)) {
                        if (z == y)
                            continue;
                        for (auto d : inst_.domain(z)) {
                            if (! compat(y, c, z, d))
                                continue;
                            bool a_ok = false, b_ok = false;
                            for (auto a : against)
                                a_ok = a_ok || compat(z, d, x_, a);
                            for (auto b : with)
                                b_ok = b_ok || ! compat(z, d, x_, b);
                            if (a_ok && b_ok)
                                return true;
                        }
                    }
                }
            }
            return false;
        }

        auto exists_sub_btp(Value a) const -> bool
        {
            auto dx = inst_.domain(x_);
            for (VarId y : neighbours(x_))
                for (auto c : inst_.domain(y)) {
                    if (compat(y, c, x_, a))
                        continue;
                    std::vector<Value> with;
                    for (auto b : dx)
                        if (compat(y, c, x_, b))
                            with.push_back(b);
                    if (with.empty())
                        continue;
                    for (VarId z : neighbours(x_)) {
                        if (z == y)
                            continue;
                        for (auto d : inst_.domain(z)) {
                            if (! compat(y, c, z, d))
                                continue;
                            for (auto b : with)
                                if (! compat(z, d, x_, b))
                                    return true;
                        }
                    }
                }
            return false;
        }

        // y:{p,q}, z:{r}; q~a, p!~a, r!~q, plus r~a (invsubBTP) or p~r (snake).
        auto exists_inv_sub_btp_or_snake(Value a, bool snake) const -> bool
        {
            for (VarId y : neighbours(x_)) {
                auto dy = inst_.domain(y);
                std::vector<Value> ps, qs;
                for (auto v : dy)
                    (compat(y, v, x_, a) ? qs : ps).push_back(v);
                if (ps.empty() || qs.empty())
                    continue;
                for (VarId z : neighbours(y)) {
                    if (z == x_)
                        continue;
                    for (auto r : inst_.domain(z)) {
                        if (! snake && ! compat(z, r, x_, a))
                            continue;
                        bool q_ok = false;
                        for (auto q : qs)
                            q_ok = q_ok || ! compat(z, r, y, q);
                        if (! q_ok)
                            continue;
                        if (! snake)
                            return true;
                        for (auto p : ps)
                            if (compat(y, p, z, r))
                                return true;
                    }
                }
            }
            return false;
        }

        auto ns(Value a, Value b) const -> bool
        {
            for (VarId y : neighbours(x_))
                for (auto c : inst_.domain(y))
                    if (compat(y, c, x_, b) && ! compat(y, c, x_, a))
                        return true;
            return false;
        }

        auto exists2_triangle(Value a, Value b) const -> bool
        {
            auto active = inst_.active_vars();
            for (VarId y : neighbours(x_))
                for (auto c : inst_.domain(y)) {
                    if (! compat(y, c, x_, b) || compat(y, c, x_, a))
                        continue;
                    for (VarId z : active) {
                        if (z == x_ || z == y)
                            continue;
                        for (auto d : inst_.domain(z))
                            if (compat(y, c, z, d) && compat(z, d, x_, b))
                                return true;
                    }
                }
            return false;
        }

        // y:{p,q}, z:{r}; p~b, p!~a, q~a, r!~q, plus r~a (invsubBTP) or p~r (snake).
        auto exists2_inv_sub_btp_or_snake(Value a, Value b, bool snake) const -> bool
        {
            for (VarId y : neighbours(x_)) {
                auto dy = inst_.domain(y);
                std::vector<Value> ps, qs;
                for (auto v : dy) {
                    if (compat(y, v, x_, a))
                        qs.push_back(v);
                    else if (compat(y, v, x_, b))
                        ps.push_back(v);
                }
                if (ps.empty() || qs.empty())
                    continue;
                for (VarId z : neighbours(y)) {
                    if (z == x_)
                        continue;
                    for (auto r : inst_.domain(z)) {
                        if (! snake && ! compat(z, r, x_, a))
                            continue;
                        bool q_ok = false;
                        for (auto q : qs)
                            q_ok = q_ok || ! compat(z, r, y, q);
                        if (! q_ok)
                            continue;
                        if (! snake)
                            return true;
                        for (auto p : ps)
                            if (compat(y, p, z, r))
                                return true;
                    }
                }
            }
            return false;
        }

    private:
        auto neighbours(VarId v) const -> std::vector<VarId>
        {
            std::vector<VarId> result;
            for (const auto & arc : inst_.arcs(v))
                if (inst_.is_active(arc.other))
                    result.push_back(arc.other);
            return result;
        }

        auto compat(VarId v, Value a, VarId w, Value b) const -> bool { return inst_.compatible({v, a}, {w, b}); }

        const Instance & inst_;
        VarId x_;
    };

} // namespace detail

/// Whether the rule's pattern occurs at x under m (see the header comment for
/// the shape of m).
inline auto rule_occurs(const Instance & inst, Rule rule, VarId x, const ValueMapping & m) -> bool
{
    if (x >= inst.var_count() || ! inst.is_active(x))
        throw ContractViolation("rule queried at an inactive variable");
    auto need = [&](Value key) {
        auto it = m.find(key);
        if (it == m.end() || ! inst.in_domain(x, it->second))
            throw ContractViolation("value mapping does not fit rule " + std::string(rule_name(rule)));
        return it->second;
    };
    std::size_t expected = rule == Rule::BTP ? 0 : is_var_rule(rule) ? 1 : 2;
    if (m.size() != expected)
        throw ContractViolation("value mapping does not fit rule " + std::string(rule_name(rule)));
    detail::Detector det(inst, x);
    switch (rule) {
    case Rule::BTP: return det.btp();
    case Rule::ExistsSubBTP: return det.exists_sub_btp(need(0));
    case Rule::ExistsInvSubBTP: return det.exists_inv_sub_btp_or_snake(need(0), false);
    case Rule::ExistsSnake: return det.exists_inv_sub_btp_or_snake(need(0), true);
    default: break;
    }
    auto a = need(0), b = need(1);
    if (a == b)
        throw ContractViolation("value mapping is not injective");
    switch (rule) {
    case Rule::NS: return det.ns(a, b);
    case Rule::Exists2Triangle: return det.exists2_triangle(a, b);
    case Rule::Exists2InvSubBTP: return det.exists2_inv_sub_btp_or_snake(a, b, false);
    case Rule::Exists2Snake: return det.exists2_inv_sub_btp_or_snake(a, b, true);
    default: break;
    }
    return true;
}

/// A mapping under which the rule's pattern is absent at x: empty for BTP,
/// otherwise {0 -> d} for the least such d. With `only`, just that d is tried.
inline auto var_eliminable(const Instance & inst, VarId x, Rule rule, std::optional<Value> only = std::nullopt) -> std::optional<ValueMapping>
{
    if (! is_var_rule(rule))
        throw ContractViolation(std::string(rule_name(rule)) + " is not a variable elimination rule");
    if (x >= inst.var_count() || ! inst.is_active(x))
        throw ContractViolation("variable " + std::to_string(x) + " is not active");
    if (rule == Rule::BTP) {
        if (only)
            throw ContractViolation("BTP takes no value mapping");
        if (! rule_occurs(inst, rule, x, {}))
            return ValueMapping{};
        return std::nullopt;
    }
    for (auto d : inst.domain(x)) {
        if (only && d != *only)
            continue;
        ValueMapping m{{0, d}};
        if (! rule_occurs(inst, rule, x, m))
            return m;
    }
    return std::nullopt;
}

/// A mapping {0 -> d, 1 -> b} under which the rule's pattern is absent at x,
/// for the least d != b (or just `only`).
inline auto val_eliminable(const Instance & inst, VarId x, Value b, Rule rule, std::optional<Value> only = std::nullopt)
    -> std::optional<ValueMapping>
{
    if (! is_val_rule(rule))
        throw ContractViolation(std::string(rule_name(rule)) + " is not a value elimination rule");
    if (x >= inst.var_count() || ! inst.is_active(x))
        throw ContractViolation("variable " + std::to_string(x) + " is not active");
    if (! inst.in_domain(x, b))
        throw ContractViolation("value " + std::to_string(b) + " is not in the domain of variable " + std::to_string(x));
    for (auto d : inst.domain(x)) {
        if (d == b || (only && d != *only))
            continue;
        ValueMapping m{{0, d}, {1, b}};
        if (! rule_occurs(inst, rule, x, m))
            return m;
    }
    return std::nullopt;
}

inline auto eliminate_variable(Instance & inst, VarId x, Rule rule, const ValueMapping & m) -> ElimRecord
{
    if (! is_var_rule(rule))
        throw ContractViolation(std::string(rule_name(rule)) + " is not a variable elimination rule");
    if (rule_occurs(inst, rule, x, m))
        throw ContractViolation("rule " + std::string(rule_name(rule)) + " occurs at variable " + std::to_string(x) + " under the given mapping");
    ElimRecord record{RecordKind::var, x, std::nullopt, rule, m, inst.domain(x)};
    inst.deactivate(x);
    return record;
}

struct ValueStep
{
    std::vector<ElimRecord> records; // the val record, then any ac records
    std::optional<VarId> wipeout;
};

/// Removes b from x and re-establishes arc consistency (skipped after NS,
/// which cannot break it).
inline auto eliminate_value(Instance & inst, VarId x, Value b, Rule rule, const ValueMapping & m) -> ValueStep
{
    if (! is_val_rule(rule))
        throw ContractViolation(std::string(rule_name(rule)) + " is not a value elimination rule");
    if (m.size() != 2 || ! m.contains(1) || m.at(1) != b)
        throw ContractViolation("value mapping must send the distinguished value to the removed value");
    if (rule_occurs(inst, rule, x, m))
        throw ContractViolation("rule " + std::string(rule_name(rule)) + " occurs at variable " + std::to_string(x) + " under the given mapping");
    ValueStep step;
    step.records.push_back(ElimRecord{RecordKind::val, x, b, rule, m, {}});
    inst.remove_value(x, b);
    if (rule == Rule::NS)
        return step;
    auto ac = enforce_ac(inst);
    for (auto p : ac.removed)
        step.records.push_back(ElimRecord{RecordKind::ac, p.var, p.val, std::nullopt, {}, {}});
    step.wipeout = ac.wipeout;
    return step;
}

enum class PhasePolicy : std::uint8_t
{
    var_first,   // all variable eliminations before any value elimination
    interleaved, // per variable: its variable rules, then its values
};

/// One forced elimination. Without a rule the first applicable enabled rule
/// is used; without a partner value the least one is used.
struct ScriptStep
{
    RecordKind kind = RecordKind::val;
    VarId var = 0;
    Value val = 0;
    std::optional<Rule> rule;
    std::optional<Value> partner; // image of pattern value a
};

struct EngineConfig
{
    std::vector<Rule> rules{all_rules.begin(), all_rules.end()};
    bool var_elim = true;
    bool val_elim = true;
    PhasePolicy policy = PhasePolicy::var_first;
    std::vector<ScriptStep> script; // applied before the canonical loop
    std::size_t max_steps = 0;      // 0 = unbounded

    auto enabled(Rule r) const -> bool
    {
        if (is_var_rule(r) ? ! var_elim : ! val_elim)
            return false;
        return std::find(rules.begin(), rules.end(), r) != rules.end();
    }

    /// Enabled rules of one family in canonical order.
    auto ordered(bool variable_rules) const -> std::vector<Rule>
    {
        std::vector<Rule> result;
        for (auto r : all_rules)
            if (is_var_rule(r) == variable_rules && enabled(r))
                result.push_back(r);
        return result;
    }
};

struct PreprocessResult
{
    Instance reduced;
    EliminationTrace trace;
    bool unsatisfiable = false;
    std::optional<VarId> wipeout;
};

namespace detail {

    class Engine
    {
    public:
        Engine(const Instance & original, const EngineConfig & cfg) : cfg_(cfg)
        {
            result_.reduced = original;
            result_.trace.fingerprint = fingerprint(original);
        }

        auto run() -> PreprocessResult
        {
            auto ac = enforce_ac(result_.reduced);
            for (auto p : ac.removed)
                push(ElimRecord{RecordKind::ac, p.var, p.val, std::nullopt, {}, {}});
            if (ac.wipeout)
                return fail(*ac.wipeout);
            for (const auto & step : cfg_.script) {
                apply_script(step);
                if (result_.unsatisfiable)
                    return std::move(result_);
            }
            while (! budget_spent()) {
                bool progressed = cfg_.policy == PhasePolicy::var_first ? var_first_step() : interleaved_step();
                if (! progressed || result_.unsatisfiable)
                    break;
            }
            return std::move(result_);
        }

    private:
        auto budget_spent() const -> bool { return cfg_.max_steps && steps_ >= cfg_.max_steps; }

        auto fail(VarId wipeout) -> PreprocessResult
        {
            result_.unsatisfiable = true;
            result_.wipeout = wipeout;
            return std::move(result_);
        }

        void push(ElimRecord record) { result_.trace.records.push_back(std::move(record)); }

        auto try_var(VarId x, Rule rule, std::optional<Value> partner = std::nullopt) -> bool
        {
            auto m = var_eliminable(result_.reduced, x, rule, partner);
            if (! m)
                return false;
            push(eliminate_variable(result_.reduced, x, rule, *m));
            ++steps_;
            return true;
        }

        auto try_val(VarId x, Value b, Rule rule, std::optional<Value> partner = std::nullopt) -> bool
        {
            if (result_.reduced.domain_size(x) < 2)
                return false;
            auto m = val_eliminable(result_.reduced, x, b, rule, partner);
            if (! m)
                return false;
            auto step = eliminate_value(result_.reduced, x, b, rule, *m);
            for (auto & r : step.records)
                push(std::move(r));
            if (step.wipeout) {
                result_.unsatisfiable = true;
                result_.wipeout = step.wipeout;
            }
            ++steps_;
            return true;
        }

        auto var_phase_for(VarId x) -> bool
        {
            for (auto rule : cfg_.ordered(true))
                if (try_var(x, rule))
                    return true;
            return false;
        }

        auto val_phase_for(VarId x) -> bool
        {
            auto rules = cfg_.ordered(false);
            for (auto b : result_.reduced.domain(x))
                for (auto rule : rules)
                    if (try_val(x, b, rule))
                        return true;
            return false;
        }

        auto var_first_step() -> bool
        {
            for (auto x : result_.reduced.active_vars())
                if (var_phase_for(x))
                    return true;
            for (auto x : result_.reduced.active_vars())
                if (val_phase_for(x))
                    return true;
            return false;
        }

        auto interleaved_step() -> bool
        {
            for (auto x : result_.reduced.active_vars())
                if (var_phase_for(x) || val_phase_for(x))
                    return true;
            return false;
        }

        void apply_script(const ScriptStep & step)
        {
            auto describe = [&] {
                return std::string(step.kind == RecordKind::var ? "var " : "val ") + std::to_string(step.var) +
                    (step.kind == RecordKind::val ? " " + std::to_string(step.val) : std::string());
            };
            if (step.var >= result_.reduced.var_count() || ! result_.reduced.is_active(step.var))
                throw ContractViolation("scripted step '" + describe() + "' names an inactive variable");
            if (step.kind == RecordKind::ac)
                throw ContractViolation("scripted steps must be var or val eliminations");
            bool variable = step.kind == RecordKind::var;
            if (! variable && ! result_.reduced.in_domain(step.var, step.val))
                throw ContractViolation("scripted step '" + describe() + "' names a removed value");
            std::vector<Rule> rules;
            if (step.rule) {
                if (is_var_rule(*step.rule) != variable)
                    throw ContractViolation("scripted step '" + describe() + "' uses a rule of the wrong kind");
                rules.push_back(*step.rule);
            }
            else {
                rules = cfg_.ordered(variable);
            }
            for (auto rule : rules) {
                bool done = variable ? try_var(step.var, rule, step.partner) : try_val(step.var, step.val, rule, step.partner);
                if (done)
                    return;
            }
            throw ContractViolation("scripted step '" + describe() + "' is not licensed by any allowed rule");
        }

        const EngineConfig & cfg_;
        PreprocessResult result_;
        std::size_t steps_ = 0;
    };

} // namespace detail

/// Establishes arc consistency, applies scripted steps, then eliminates to a
/// fixpoint in canonical order. The input is not modified.
inline auto preprocess(const Instance & original, const EngineConfig & cfg = {}) -> PreprocessResult
{
    if (original.active_count() != original.var_count())
        throw ContractViolation("preprocess expects an instance without eliminated variables");
    return detail::Engine(original, cfg).run();
}

} // namespace cspprune
