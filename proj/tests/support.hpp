#pragma once

#include <cspprune/cspprune.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace cspprune::test_support {

// Small patterns on x = 0 (a = 0, b = 1), y = 1 (c = 0), z = 2 (d = 0).
inline auto ex_p1() -> Pattern
{
    Pattern p({{1}, {0}, {0}});
    p.set_cpt({1, 0}, {0, 1}, false);
    p.set_cpt({1, 0}, {2, 0}, false);
    return p;
}

inline auto ex_p2() -> Pattern
{
    Pattern p({{0, 1}, {0}, {0}});
    p.set_cpt({2, 0}, {0, 0}, true);
    p.set_cpt({1, 0}, {2, 0}, false);
    p.set_cpt({1, 0}, {0, 1}, false);
    return p;
}

inline auto ex_p3() -> Pattern
{
    auto p = ex_p2();
    p.set_cpt({2, 0}, {0, 1}, false);
    return p;
}

inline auto ex_p4() -> Pattern
{
    Pattern p({{1}, {0}, {0}});
    p.set_cpt({2, 0}, {0, 1}, true);
    p.set_cpt({1, 0}, {0, 1}, false);
    p.set_cpt({1, 0}, {2, 0}, false);
    return p;
}

inline auto ex_p2_quantified() -> Pattern
{
    auto p = ex_p2();
    p.quantify(0, {0});
    return p;
}

inline auto exists_btp() -> Pattern
{
    auto p = get_pattern("BTP").pattern;
    p.quantify(0, {0});
    return p;
}

/// Renames variables by `var_perm` and shifts every value of variable v by
/// `offset[v]` (after renaming).
inline auto relabel(const Pattern & p, const std::vector<VarId> & var_perm, const std::vector<Value> & offset) -> Pattern
{
    std::vector<std::vector<Value>> domains(p.var_count());
    for (VarId v = 0; v < p.var_count(); ++v)
        for (auto a : p.domain(v))
            domains[var_perm[v]].push_back(a + offset[var_perm[v]]);
    Pattern q(domains);
    for (const auto & [edge, value] : p.edges()) {
        auto map = [&](Assignment s) { return Assignment{var_perm[s.var], s.val + offset[var_perm[s.var]]}; };
        q.set_cpt(map(edge.first), map(edge.second), value);
    }
    if (auto v = p.distinguished_var()) {
        VarId w = var_perm[*v];
        std::vector<Value> e;
        for (auto a : p.existential())
            e.push_back(a + offset[w]);
        std::optional<Value> dv;
        if (p.distinguished_val())
            dv = *p.distinguished_val() + offset[w];
        q.quantify(w, e, dv);
    }
    return q;
}

inline auto random_relabel(const Pattern & p, std::mt19937_64 & rng) -> Pattern
{
    std::vector<VarId> perm(p.var_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Value> offset(p.var_count());
    for (auto & o : offset)
        o = Value(rng() % 5);
    return relabel(p, perm, offset);
}

/// Random pattern with up to `n` variables and `d` values per variable.
inline auto random_pattern(std::mt19937_64 & rng, std::size_t n, std::size_t d, double edge_prob) -> Pattern
{
    std::size_t vars = 1 + rng() % n;
    std::vector<std::vector<Value>> domains(vars);
    for (auto & dom : domains) {
        std::size_t size = 1 + rng() % d;
        for (Value a = 0; a < size; ++a)
            dom.push_back(a);
    }
    Pattern p(domains);
    for (VarId v = 0; v < vars; ++v)
        for (VarId w = v + 1; w < vars; ++w)
            for (auto a : domains[v])
                for (auto b : domains[w])
                    if (double(rng() % 1000) / 1000.0 < edge_prob)
                        p.set_cpt({v, a}, {w, b}, rng() % 2);
    if (rng() % 2) {
        VarId x = VarId(rng() % vars);
        std::vector<Value> e;
        for (auto a : domains[x])
            if (rng() % 2)
                e.push_back(a);
        p.quantify(x, e);
    }
    return p;
}

/// All injective maps from `keys` into `values`.
inline auto injective_mappings(const std::vector<Value> & keys, const std::vector<Value> & values) -> std::vector<ValueMapping>
{
    std::vector<ValueMapping> result;
    ValueMapping current;
    std::vector<bool> used(values.size(), false);
    auto rec = [&](auto & self, std::size_t i) -> void {
        if (i == keys.size()) {
            result.push_back(current);
            return;
        }
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (used[j])
                continue;
            used[j] = true;
            current[keys[i]] = values[j];
            self(self, i + 1);
            current.erase(keys[i]);
            used[j] = false;
        }
    };
    rec(rec, 0);
    return result;
}

/// Applies the records of a trace to a copy of `original`, one at a time,
/// calling `visit(state, record)` after each.
template <class Visit>
void replay(const Instance & original, const EliminationTrace & trace, Visit visit)
{
    Instance state = original;
    for (const auto & r : trace.records) {
        if (r.kind == RecordKind::var)
            state.deactivate(r.var);
        else
            state.remove_value(r.var, *r.val);
        visit(state, r);
    }
}

} // namespace cspprune::test_support
