#pragma once

// Named instances with their expected properties, and seeded random
// instances.
//
// Counterexample fixtures come in two kinds. For a var-elim counterexample
// the instance has a partial solution on every variable except x but no
// solution, while some pattern is absent at x. For a val-elim
// counterexample the instance has a solution using (x, b), has none once b
// is deleted, and some pattern is absent at x with its distinguished value
// mapped to b.

#include <cspprune/arc_consistency.hpp>
#include <cspprune/catalog.hpp>
#include <cspprune/model.hpp>
#include <cspprune/oracle.hpp>
#include <cspprune/pattern_algebra.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cspprune {

enum class FixtureKind
{
    example,
    var_elim_counterexample,
    val_elim_counterexample,
};

/// The pattern is absent at `at` under `mapping`, or anywhere when `at` is empty.
struct AbsenceClaim
{
    std::string pattern; // catalog name or a name from extra_patterns()
    std::optional<VarId> at;
    ValueMapping mapping;
};

struct FixtureExpectation
{
    FixtureKind kind = FixtureKind::example;
    bool satisfiable = true;
    std::optional<VarId> x;
    std::optional<Value> b; // val-elim counterexamples
    std::optional<std::uint64_t> solution_count;
    std::vector<AbsenceClaim> absent;
};

struct Fixture
{
    std::string name;
    std::vector<std::int64_t> params;
    Instance instance;
    FixtureExpectation expect;
};

/// Patterns used by fixture claims that are not catalog entries: two
/// non-mergeable incompatibility edges in one constraint, attached to a
/// flat distinguished variable (TwoNegEdges) or to a distinguished value
/// (TwoNegEdgesVal).
inline auto extra_pattern(const std::string & name) -> std::optional<Pattern>
{
    if (name != "TwoNegEdges" && name != "TwoNegEdgesVal")
        return std::nullopt;
    Pattern p({{0}, {0, 1}, {0, 1}});
    p.set_cpt({1, 0}, {2, 0}, false);
    p.set_cpt({1, 1}, {2, 1}, false);
    p.set_cpt({1, 0}, {2, 1}, true);
    p.set_cpt({1, 1}, {2, 0}, true);
    if (name == "TwoNegEdges")
        p.quantify(0);
    else
        p.quantify(0, {0}, 0);
    return p;
}

inline auto claim_pattern(const std::string & name) -> Pattern
{
    if (auto p = extra_pattern(name))
        return *p;
    return get_pattern(name).pattern;
}

namespace detail {

    using Pred = std::function<bool(Value, Value)>;

    struct Builder
    {
        std::vector<std::vector<Value>> domains;
        std::vector<ConstraintSpec> constraints;

        auto var(std::vector<Value> domain) -> VarId
        {
            domains.push_back(std::move(domain));
            return VarId(domains.size() - 1);
        }

        void rel(VarId i, VarId j, const Pred & allowed)
        {
            ConstraintSpec c{i, j, {}};
            for (auto a : domains[i])
                for (auto b : domains[j])
                    if (allowed(a, b))
                        c.allowed.emplace_back(a, b);
            constraints.push_back(std::move(c));
        }

        auto build() const -> Instance { return Instance::make(domains, constraints); }
    };

    inline auto range(Value lo, Value hi) -> std::vector<Value>
    {
        std::vector<Value> r;
        for (Value v = lo; v <= hi; ++v)
            r.push_back(v);
        return r;
    }

    inline auto in_set(std::initializer_list<std::pair<Value, Value>> pairs) -> Pred
    {
        std::vector<std::pair<Value, Value>> list(pairs);
        return [list](Value a, Value b) { return std::find(list.begin(), list.end(), std::pair{a, b}) != list.end(); };
    }

    inline const Pred neq = [](Value a, Value b) { return a != b; };
    inline const Pred eq = [](Value a, Value b) { return a == b; };

    inline auto param(const std::vector<std::int64_t> & params, std::size_t i, std::int64_t fallback, std::int64_t min,
        const std::string & name) -> std::int64_t
    {
        auto v = i < params.size() ? params[i] : fallback;
        if (v < min)
            throw InputError("fixture " + name + ": parameter " + std::to_string(i + 1) + " must be at least " + std::to_string(min));
        return v;
    }

    // Reproducible uniform double in [0, 1).
    inline auto unit(std::mt19937_64 & rng) -> double { return double(rng() >> 11) * 0x1.0p-53; }

    inline auto below(std::mt19937_64 & rng, std::uint64_t n) -> std::uint64_t { return rng() % n; }

} // namespace detail

/// Random instance with domains {0..d-1}: each pair gets a constraint with
/// probability `density`, each value pair of a constraint is forbidden with
/// probability `tightness`. Arc consistency is enforced before returning;
/// draws that wipe out are discarded, up to 1000 attempts.
inline auto random_instance(std::size_t n, std::size_t d, double density, double tightness, std::uint64_t seed) -> Instance
{
    if (n < 1 || d < 1)
        throw InputError("random instance needs n >= 1 and d >= 1");
    if (! (density >= 0 && density <= 1) || ! (tightness >= 0 && tightness <= 1))
        throw InputError("density and tightness must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::vector<Value>> domains(n, detail::range(0, Value(d - 1)));
        std::vector<ConstraintSpec> constraints;
        for (VarId i = 0; i < n; ++i)
            for (VarId j = i + 1; j < n; ++j) {
                if (detail::unit(rng) >= density)
                    continue;
                ConstraintSpec c{i, j, {}};
                for (Value a = 0; a < d; ++a)
                    for (Value b = 0; b < d; ++b)
                        if (detail::unit(rng) >= tightness)
                            c.allowed.emplace_back(a, b);
                constraints.push_back(std::move(c));
            }
        auto inst = Instance::make(domains, constraints);
        if (! enforce_ac(inst).wipeout)
            return inst;
    }
    throw InputError("no arc-consistent instance drawn in 1000 attempts; lower the tightness or density");
}

/// Random tree-structured instance: variable i > 0 is constrained with a
/// uniformly chosen earlier variable, and every relation gives each value a
/// support on both sides, so the instance is arc consistent and satisfiable.
inline auto random_tree_instance(std::size_t n, std::size_t d, std::uint64_t seed, double tightness = 0.5) -> Instance
{
    if (n < 1 || d < 1)
        throw InputError("random tree instance needs n >= 1 and d >= 1");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Value>> domains(n, detail::range(0, Value(d - 1)));
    std::vector<ConstraintSpec> constraints;
    for (VarId i = 1; i < n; ++i) {
        auto parent = VarId(detail::below(rng, i));
        std::vector<std::vector<std::uint8_t>> allowed(d, std::vector<std::uint8_t>(d, 0));
        for (Value a = 0; a < d; ++a)
            for (Value b = 0; b < d; ++b)
                allowed[a][b] = detail::unit(rng) >= tightness;
        for (Value a = 0; a < d; ++a) {
            if (std::find(allowed[a].begin(), allowed[a].end(), 1) == allowed[a].end())
                allowed[a][detail::below(rng, d)] = 1;
            bool column = false;
            for (Value b = 0; b < d; ++b)
                column = column || allowed[b][a];
            if (! column)
                allowed[detail::below(rng, d)][a] = 1;
        }
        ConstraintSpec c{parent, i, {}};
        for (Value a = 0; a < d; ++a)
            for (Value b = 0; b < d; ++b)
                if (allowed[a][b])
                    c.allowed.emplace_back(a, b);
        constraints.push_back(std::move(c));
    }
    return Instance::make(domains, constraints);
}

/// 2-colouring of a star: variable 0 is the centre.
inline auto star_instance(std::size_t n) -> Instance
{
    if (n < 2)
        throw InputError("a star needs at least 2 vertices");
    detail::Builder g;
    for (std::size_t i = 0; i < n; ++i)
        g.var({0, 1});
    for (VarId leaf = 1; leaf < n; ++leaf)
        g.rel(0, leaf, detail::neq);
    return g.build();
}

/// Shifts every value of J up by one, adds 0 to every domain, and adds a new
/// last variable x with domain {0, 1}: (x, 0) is compatible only with value
/// 0 elsewhere, (x, 1) with every nonzero value, and value 0 is compatible
/// with everything among J's variables.
inline auto ij_instance(const Instance & j) -> Instance
{
    if (j.active_count() != j.var_count())
        throw ContractViolation("IJ needs an instance without eliminated variables");
    detail::Builder g;
    auto n = VarId(j.var_count());
    for (VarId v = 0; v < n; ++v) {
        std::vector<Value> dom{0};
        for (auto a : j.domain(v))
            dom.push_back(a + 1);
        g.var(dom);
    }
    VarId x = g.var({0, 1});
    for (VarId v = 0; v < n; ++v)
        for (const auto & arc : j.arcs(v)) {
            if (arc.other < v)
                continue;
            g.rel(v, arc.other, [&, arc](Value a, Value b) { return a == 0 || b == 0 || j.compatible(arc, a - 1, b - 1); });
        }
    for (VarId v = 0; v < n; ++v)
        g.rel(v, x, [](Value a, Value xv) { return xv == 0 ? a == 0 : a != 0; });
    return g.build();
}

inline auto fixture_names() -> std::vector<std::string>
{
    return {"K3_2COL", "IE4", "I4", "IZOA4", "I7", "ISAT4", "ISAT6", "I4K", "ISAT3", "ISAT2K1", "I3", "I3PLUS", "I32K", "I2", "K4_COLOUR",
        "BOOL3", "NONCONF", "STAR", "IJ"};
}

/// Builds a named fixture. Parameters that are omitted take their defaults.
inline auto fixture(std::string name, const std::vector<std::int64_t> & params = {}) -> Fixture
{
    using namespace detail;
    if (name == "I∃4")
        name = "IE4";
    Fixture f{name, params, {}, {}};
    auto & e = f.expect;
    Builder g;
    auto var_counter = [&](VarId x, std::vector<AbsenceClaim> claims) {
        e.kind = FixtureKind::var_elim_counterexample;
        e.satisfiable = false;
        e.x = x;
        e.solution_count = 0;
        e.absent = std::move(claims);
    };
    auto val_counter = [&](VarId x, Value b, std::vector<AbsenceClaim> claims) {
        e.kind = FixtureKind::val_elim_counterexample;
        e.satisfiable = true;
        e.x = x;
        e.b = b;
        e.absent = std::move(claims);
    };

    if (name == "K3_2COL") {
        for (int i = 0; i < 3; ++i)
            g.var({0, 1});
        g.rel(0, 1, neq);
        g.rel(0, 2, neq);
        g.rel(1, 2, neq);
        var_counter(2, {{"Diamond", {}, {}}, {"Z", {}, {}}, {"XL", {}, {}}, {"Triangle", {}, {}}});
    }
    else if (name == "IE4") {
        for (int i = 0; i < 3; ++i)
            g.var({0, 1, 2});
        VarId x = g.var({0, 1, 2, 3});
        auto r = in_set({{0, 0}, {1, 2}, {2, 1}});
        g.rel(0, 1, r);
        g.rel(0, 2, r);
        g.rel(1, 2, r);
        for (VarId i = 0; i < 3; ++i)
            g.rel(i, x, [i](Value xi, Value xv) { return xi > 0 || xv == i + 1; });
        var_counter(x, {{"VPlusMinus", x, {{0, 0}}}, {"TriangleAsym", x, {{0, 0}}}});
    }
    else if (name == "I4") {
        for (int i = 0; i < 3; ++i)
            g.var({0, 1});
        VarId x = g.var({1, 2, 3});
        auto either = [](Value a, Value b) { return a == 1 || b == 1; };
        g.rel(0, 1, either);
        g.rel(0, 2, either);
        g.rel(1, 2, either);
        for (VarId i = 0; i < 3; ++i)
            g.rel(i, x, [i](Value xi, Value xv) { return (xi == 1) == (xv == i + 1); });
        var_counter(x, {{"KiteSym", x, {}}});
    }
    else if (name == "IZOA4") {
        for (int i = 0; i < 4; ++i)
            g.var({1, 2, 3});
        VarId x = 3;
        g.rel(0, 1, eq);
        g.rel(0, 2, eq);
        g.rel(1, 2, eq);
        for (VarId i = 0; i < 3; ++i)
            g.rel(i, x, [i](Value xi, Value xv) { return xi == i + 1 || xv == i + 1; });
        var_counter(x, {{"KiteAsym", x, {}}});
    }
    else if (name == "I7") {
        for (int i = 0; i < 6; ++i)
            g.var({0, 1, 2});
        VarId x = g.var({0, 1});
        auto r = in_set({{0, 0}, {1, 2}, {2, 1}});
        auto r0 = in_set({{0, 0}, {1, 1}, {2, 1}});
        auto r1 = in_set({{0, 1}, {1, 0}, {2, 0}});
        for (VarId base : {0u, 3u})
            for (VarId i = base; i < base + 3; ++i)
                for (VarId j = i + 1; j < base + 3; ++j)
                    g.rel(i, j, r);
        for (VarId i = 0; i < 3; ++i)
            g.rel(i, x, r0);
        for (VarId i = 3; i < 6; ++i)
            g.rel(i, x, r1);
        var_counter(x, {{"RotSubBTP", x, {}}});
    }
    else if (name == "ISAT4") {
        for (int i = 0; i < 4; ++i)
            g.var({0, 1});
        VarId x = 3;
        g.rel(0, 1, eq);
        g.rel(0, 2, eq);
        g.rel(1, 2, [](Value a, Value b) { return a || b; });
        g.rel(1, x, [](Value a, Value b) { return ! a || b; });
        g.rel(2, x, [](Value a, Value b) { return ! a || ! b; });
        var_counter(x, {{"PivotSym", x, {}}});
    }
    else if (name == "ISAT6") {
        for (int i = 0; i < 6; ++i)
            g.var({0, 1});
        VarId x = 5;
        // Variables x1..x5 are 0..4.
        g.rel(0, 1, [](Value a, Value b) { return ! a || ! b; });
        g.rel(0, 3, [](Value a, Value b) { return ! a || ! b; });
        g.rel(0, 2, [](Value a, Value b) { return a || ! b; });
        g.rel(0, 4, [](Value a, Value b) { return a || ! b; });
        g.rel(1, x, [](Value a, Value b) { return a || ! b; });
        g.rel(3, x, [](Value a, Value b) { return a || b; });
        g.rel(2, x, [](Value a, Value b) { return a || ! b; });
        g.rel(4, x, [](Value a, Value b) { return a || b; });
        var_counter(x, {{"Cycle3", {}, {}}, {"PivotAsym", x, {}}, {"TwoNegEdges", x, {}}});
    }
    else if (name == "I4K") {
        auto k = Value(param(params, 0, 5, 5, name));
        for (int i = 0; i < 3; ++i)
            g.var({0, 1, 2});
        VarId x = g.var(range(1, k));
        auto mirror = [](Value a, Value b) { return a == 2 - b; };
        g.rel(0, 1, mirror);
        g.rel(0, 2, mirror);
        g.rel(1, 2, mirror);
        for (VarId i = 0; i < 3; ++i)
            g.rel(i, x, [i](Value xi, Value xv) { return xi != 1 || xv == i + 1; });
        ValueMapping m{{0, 4}, {1, 5}};
        var_counter(x, {{"NS", x, m}, {"Exists2Triangle", x, m}, {"Exists2InvSubBTP", x, m}, {"Exists2Snake", x, m}});
    }
    else if (name == "ISAT3") {
        auto k = Value(param(params, 0, 5, 1, name));
        g.var({0, 1});
        g.var({0, 1});
        VarId x = g.var(range(0, k));
        g.rel(0, 1, [](Value a, Value b) { return ! a || ! b; });
        g.rel(0, x, [](Value a, Value xv) { return a || xv == 0; });
        g.rel(1, x, [](Value a, Value xv) { return a || xv == 0; });
        val_counter(x, 0, {{"IMinus", x, {{0, 0}}}});
    }
    else if (name == "ISAT2K1") {
        auto k = Value(param(params, 0, 2, 1, name));
        for (Value i = 0; i < 2 * k; ++i)
            g.var({0, 1});
        VarId x = g.var(range(0, k));
        for (Value i = 1; i <= k; ++i) {
            VarId p = 2 * i - 2, q = 2 * i - 1;
            g.rel(p, q, [](Value a, Value b) { return ! a || ! b; });
            g.rel(p, x, [i](Value a, Value xv) { return a || xv != i; });
            g.rel(q, x, [i](Value a, Value xv) { return a || xv != i; });
        }
        val_counter(x, 0, {{"TwoNegEdgesVal", x, {{0, 0}}}});
    }
    else if (name == "I3") {
        auto k = Value(param(params, 0, 2, 1, name));
        for (int i = 0; i < 3; ++i)
            g.var(range(0, k));
        VarId x = 2;
        g.rel(0, 1, [](Value a, Value b) { return a == 0 || b == 0; });
        g.rel(0, x, eq);
        g.rel(1, x, eq);
        ValueMapping m{{0, 0}};
        val_counter(x, 0, {{"LPlusMinus", x, m}, {"Triangle2", x, m}, {"ExistsKite1", x, m}});
    }
    else if (name == "I3PLUS") {
        auto k = Value(param(params, 0, 2, 1, name));
        for (int i = 0; i < 4; ++i)
            g.var(range(0, k));
        VarId x = 3;
        g.rel(0, 1, [](Value a, Value b) { return a == 0 || b == 0; });
        g.rel(0, 2, eq);
        g.rel(1, 2, eq);
        g.rel(2, x, eq);
        val_counter(x, 0, {{"LMinus", x, {}}});
    }
    else if (name == "I32K") {
        auto k = Value(param(params, 0, 2, 1, name));
        for (int i = 0; i < 3; ++i)
            g.var(range(0, 2 * k));
        VarId x = 2;
        g.rel(0, 1, [k](Value a, Value b) { return a == 2 * k - b; });
        g.rel(0, x, eq);
        g.rel(1, x, eq);
        ValueMapping m{{0, k}};
        val_counter(x, k,
            {{"Triangle1", x, m}, {"ExistsKite", x, m}, {"ExistsKiteAsym", x, m}, {"Diamond", {}, {}}, {"Z", {}, {}}});
        e.solution_count = 1;
    }
    else if (name == "I2") {
        g.var({0});
        g.var({0});
        g.rel(0, 1, eq);
        val_counter(0, 0, {{"IMinus", 0, {{0, 0}}}, {"LPlusMinus", 0, {{0, 0}}}});
        e.solution_count = 1;
    }
    else if (name == "K4_COLOUR") {
        g.var({0, 1, 2, 3});
        g.var({0, 1});
        g.var({0, 2});
        g.var({0, 3});
        for (VarId i = 0; i < 4; ++i)
            for (VarId j = i + 1; j < 4; ++j)
                g.rel(i, j, neq);
        e.x = 0;
        e.absent = {{"Exists2Snake", 0, {{0, 0}, {1, 1}}}, {"Exists2Snake", 0, {{0, 0}, {1, 2}}}, {"Exists2Snake", 0, {{0, 0}, {1, 3}}}};
    }
    else if (name == "BOOL3") {
        for (int i = 0; i < 3; ++i)
            g.var({0, 1});
        // x = 0, y = 1, z = 2
        g.rel(2, 0, [](Value z, Value x) { return z || ! x; });
        g.rel(2, 1, [](Value z, Value y) { return z || y; });
        g.rel(1, 0, [](Value y, Value x) { return ! y || ! x; });
        e.x = 0;
        e.absent = {{"Exists2InvSubBTP", 0, {{0, 1}, {1, 0}}}};
    }
    else if (name == "NONCONF") {
        for (int i = 0; i < 3; ++i)
            g.var({0, 1, 2});
        auto r = in_set({{0, 0}, {0, 2}, {1, 1}, {2, 1}, {2, 2}});
        g.rel(0, 1, [](Value a, Value b) { return a != 2 || b != 2; });
        g.rel(0, 2, r);
        g.rel(1, 2, r);
        e.x = 2;
        e.absent = {{"Exists2Snake", 2, {{0, 2}, {1, 0}}}, {"Exists2Snake", 2, {{0, 0}, {1, 1}}}};
    }
    else if (name == "STAR") {
        auto n = std::size_t(param(params, 0, 4, 2, name));
        f.instance = star_instance(n);
        e.x = 0;
        e.solution_count = 2;
        e.absent = {{"ExistsInvSubBTP", 0, {{0, 0}}}, {"ExistsSnake", 0, {{0, 0}}}};
        return f;
    }
    else if (name == "IJ") {
        auto n = std::size_t(param(params, 0, 3, 1, name));
        auto d = std::size_t(param(params, 1, 2, 1, name));
        auto seed = std::uint64_t(param(params, 2, 1, 0, name));
        auto j = random_instance(n, d, 0.6, 0.35, seed);
        // Rebuild J from its live values so arc-consistency removals do not linger.
        std::vector<std::vector<Value>> dom;
        std::vector<ConstraintSpec> cons;
        for (VarId v = 0; v < j.var_count(); ++v)
            dom.push_back(j.domain(v));
        for (VarId v = 0; v < j.var_count(); ++v)
            for (const auto & arc : j.arcs(v))
                if (arc.other > v) {
                    ConstraintSpec c{v, arc.other, {}};
                    for (auto a : j.domain(v))
                        for (auto b : j.domain(arc.other))
                            if (j.compatible(arc, a, b))
                                c.allowed.emplace_back(a, b);
                    cons.push_back(std::move(c));
                }
        auto clean = Instance::make(dom, cons);
        f.instance = ij_instance(clean);
        VarId x = VarId(n);
        e.x = x;
        e.solution_count = 1 + count_solutions(clean);
        e.absent = {{"Exists2InvSubBTP", x, {{0, 0}, {1, 1}}}, {"Exists2Snake", x, {{0, 0}, {1, 1}}}};
        return f;
    }
    else {
        throw InputError("unknown fixture '" + name + "'");
    }
    f.instance = g.build();
    return f;
}

/// Checks a fixture against its expectation with the oracle and both
/// occurrence procedures. Returns human-readable failures (empty = verified).
inline auto verify_fixture(const Fixture & f) -> std::vector<std::string>
{
    std::vector<std::string> failures;
    const auto & inst = f.instance;
    const auto & e = f.expect;
    if (! is_arc_consistent(inst))
        failures.push_back("instance is not arc consistent");
    bool sat = is_satisfiable(inst);
    if (sat != e.satisfiable)
        failures.push_back(std::string("expected ") + (e.satisfiable ? "satisfiable" : "unsatisfiable"));
    if (e.solution_count && count_solutions(inst) != *e.solution_count)
        failures.push_back("expected " + std::to_string(*e.solution_count) + " solutions");

    if (e.kind == FixtureKind::var_elim_counterexample) {
        Instance without = inst;
        without.deactivate(*e.x);
        if (! is_satisfiable(without))
            failures.push_back("no partial solution on the variables other than x");
    }
    if (e.kind == FixtureKind::val_elim_counterexample) {
        Instance fixed = inst;
        for (auto a : inst.domain(*e.x))
            if (a != *e.b)
                fixed.remove_value(*e.x, a);
        if (! is_satisfiable(fixed))
            failures.push_back("no solution uses (x, b)");
        Instance removed = inst;
        removed.remove_value(*e.x, *e.b);
        if (is_satisfiable(removed))
            failures.push_back("deleting (x, b) keeps the instance satisfiable");
    }

    for (const auto & claim : e.absent) {
        auto p = claim_pattern(claim.pattern);
        std::string where = claim.pattern + (claim.at ? " at " + std::to_string(*claim.at) : std::string(" anywhere"));
        bool fast = claim.at ? occurs_at(p, inst, *claim.at, claim.mapping).has_value() : occurs_in(p, inst).has_value();
        bool brute = claim.at ? brute_occurs(p, inst, *claim.at, claim.mapping) : brute_occurs_in(p, inst);
        if (fast != brute)
            failures.push_back("occurrence procedures disagree on " + where);
        if (fast || brute)
            failures.push_back(where + " occurs");
    }
    return failures;
}

} // namespace cspprune
