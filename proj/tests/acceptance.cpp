// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cspprune/cspprune.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace cspprune;

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Check
{
    std::vector<std::string> failures;

    void expect(bool ok, const std::string & what)
    {
        if (! ok && failures.size() < 20)
            failures.push_back(what);
        else if (! ok)
            ++suppressed;
    }

    std::size_t suppressed = 0;
};

auto domains_of(const Instance & inst) -> std::string
{
    std::ostringstream out;
    for (VarId v = 0; v < inst.var_count(); ++v) {
        out << (v ? " " : "") << v << ":{";
        auto dom = inst.domain(v);
        for (std::size_t i = 0; i < dom.size(); ++i)
            out << (i ? "," : "") << dom[i];
        out << '}';
    }
    return out.str();
}

auto all_singletons(const Instance & inst) -> bool
{
    for (auto v : inst.active_vars())
        if (inst.domain_size(v) != 1)
            return false;
    return true;
}

auto val_only(std::vector<Rule> rules = {all_rules.begin(), all_rules.end()}) -> EngineConfig
{
    EngineConfig cfg;
    cfg.var_elim = false;
    cfg.rules = std::move(rules);
    return cfg;
}

auto records_of(const EliminationTrace & trace, RecordKind kind) -> std::vector<ElimRecord>
{
    std::vector<ElimRecord> out;
    for (const auto & r : trace.records)
        if (r.kind == kind)
            out.push_back(r);
    return out;
}

auto injective_mappings(const std::vector<Value> & keys, const std::vector<Value> & values) -> std::vector<ValueMapping>
{
    std::vector<ValueMapping> result;
    ValueMapping current;
    std::vector<bool> used(values.size(), false);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == keys.size()) {
            result.push_back(current);
            return;
        }
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (used[j])
                continue;
            used[j] = true;
            current[keys[i]] = values[j];
            rec(i + 1);
            current.erase(keys[i]);
            used[j] = false;
        }
    };
    rec(0);
    return result;
}

auto criterion1(Check & c)
{
    auto start = Clock::now();
    auto k4 = fixture("K4_COLOUR").instance;
    auto result = preprocess(k4, val_only({Rule::NS, Rule::Exists2Triangle, Rule::Exists2Snake}));
    auto vals = records_of(result.trace, RecordKind::val);
    std::set<Value> removed;
    for (const auto & r : vals) {
        c.expect(r.var == 0 && r.rule == Rule::Exists2Snake, "value elimination other than ∃2snake at x1");
        removed.insert(*r.val);
    }
    c.expect(vals.size() == 3 && removed == std::set<Value>{1, 2, 3}, "expected exactly values 1, 2, 3 of x1 removed");
    c.expect(records_of(result.trace, RecordKind::var).empty(), "unexpected variable elimination");
    c.expect(! result.unsatisfiable && all_singletons(result.reduced), "domains not all singletons: " + domains_of(result.reduced));
    c.expect(is_satisfiable(result.reduced), "reduced instance unsatisfiable");
    auto s = greedy_solve(k4, result);
    c.expect(s && is_solution(k4, *s), "recovered assignment is not a colouring");
    if (s) {
        bool proper = true;
        for (VarId i = 0; i < 4; ++i)
            for (VarId j = i + 1; j < 4; ++j)
                proper = proper && s->at(i) != s->at(j);
        c.expect(proper, "recovered colouring is not proper");
    }
    c.expect(seconds_since(start) < 1.0, "took longer than 1 s");
}

auto criterion2(Check & c)
{
    auto bool3 = fixture("BOOL3").instance;
    auto result = preprocess(bool3, val_only());
    const auto & recs = result.trace.records;
    c.expect(recs.size() == 3, "expected exactly 3 trace records, got " + std::to_string(recs.size()));
    if (recs.size() == 3) {
        c.expect(recs[0].kind == RecordKind::val && recs[0].var == 0 && recs[0].val == Value(0) && recs[0].rule == Rule::Exists2InvSubBTP,
            "first record is not ∃2invsubBTP removing <x,0>");
        std::set<std::pair<VarId, Value>> ac;
        for (std::size_t i = 1; i < 3; ++i)
            if (recs[i].kind == RecordKind::ac)
                ac.emplace(recs[i].var, *recs[i].val);
        c.expect(ac == std::set<std::pair<VarId, Value>>{{1, 1}, {2, 0}}, "AC did not remove exactly <y,1> and <z,0>");
    }
    c.expect(! result.unsatisfiable && all_singletons(result.reduced), "domains not all singletons: " + domains_of(result.reduced));
}

auto criterion3(Check & c)
{
    auto k3 = fixture("K3_2COL").instance;
    auto cfg = val_only();
    cfg.script.push_back(ScriptStep{RecordKind::val, 0, 1, Rule::Exists2Triangle, std::nullopt});
    auto result = preprocess(k3, cfg);
    c.expect(! result.trace.records.empty() && result.trace.records[0].kind == RecordKind::val && result.trace.records[0].var == 0 &&
            result.trace.records[0].val == Value(1) && result.trace.records[0].rule == Rule::Exists2Triangle,
        "first record is not ∃2triangle removing <x1,1>");
    c.expect(result.unsatisfiable && result.wipeout.has_value(), "no AC wipeout reported");
    c.expect(records_of(result.trace, RecordKind::val).size() == 1, "wipeout did not follow the first value elimination");
    c.expect(! is_satisfiable(k3), "oracle finds the original satisfiable");
}

auto val_fixpoint(const Instance & inst) -> bool
{
    for (auto x : inst.active_vars()) {
        if (inst.domain_size(x) < 2)
            continue;
        for (auto b : inst.domain(x))
            for (auto rule : all_rules)
                if (is_val_rule(rule) && val_eliminable(inst, x, b, rule))
                    return false;
    }
    return true;
}

auto criterion4(Check & c)
{
    auto inst = fixture("NONCONF").instance;
    auto first = [&](Value b) {
        auto cfg = val_only();
        cfg.script.push_back(ScriptStep{RecordKind::val, 2, b, std::nullopt, std::nullopt});
        return preprocess(inst, cfg);
    };
    auto one = first(1);
    auto zero = first(0);
    c.expect(! one.unsatisfiable && all_singletons(one.reduced), "<x3,1> first does not reach singletons: " + domains_of(one.reduced));
    c.expect(! zero.unsatisfiable && val_fixpoint(zero.reduced), "<x3,0> first is not at a value-elimination fixpoint");
    c.expect(records_of(zero.trace, RecordKind::val).size() == 1, "<x3,0> first: further value eliminations fired");
    c.expect(! all_singletons(zero.reduced), "<x3,0> first reached singletons");
    c.expect(! equivalent(instance_as_pattern(one.reduced), instance_as_pattern(zero.reduced)), "the two final instances are equivalent");
}

auto criterion5(Check & c)
{
    for (std::size_t n = 4; n <= 10; ++n) {
        auto star = star_instance(n);
        auto tag = "n=" + std::to_string(n) + ": ";
        c.expect(count_solutions(star) == 2, tag + "original does not have 2 solutions");
        auto m = var_eliminable(star, 0, Rule::ExistsSnake);
        c.expect(m.has_value(), tag + "∃snake does not license the centre");
        if (! m)
            continue;
        EliminationTrace trace{fingerprint(star), {}};
        Instance reduced = star;
        trace.records.push_back(eliminate_variable(reduced, 0, Rule::ExistsSnake, *m));
        c.expect(count_solutions(reduced) == (std::uint64_t(1) << (n - 1)), tag + "reduced count is not 2^(n-1)");
        for (const auto & s : enumerate_solutions(reduced))
            c.expect(is_solution(star, recover_one(star, trace, s)), tag + "recover_one gave an invalid colouring");
        bool rejected = false;
        try {
            recover_all(star, trace, enumerate_solutions(reduced));
        }
        catch (const ContractViolation &) {
            rejected = true;
        }
        c.expect(rejected, tag + "recover_all accepted the trace");
    }
}

auto random_small(std::mt19937_64 & rng, std::size_t max_n, std::size_t max_d, std::uint64_t seed) -> Instance
{
    std::size_t n = 2 + rng() % (max_n - 1);
    std::size_t d = 2 + rng() % (max_d - 1);
    double density = 0.3 + 0.7 * double(rng() % 1000) / 1000.0;
    double tightness = 0.1 + 0.4 * double(rng() % 1000) / 1000.0;
    return random_instance(n, d, density, tightness, seed);
}

auto criterion6(Check & c)
{
    std::mt19937_64 rng(6);
    std::size_t checked = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        auto inst = random_small(rng, 6, 4, 6000 + i);
        bool sat = is_satisfiable(inst);
        auto tag = "instance " + std::to_string(i) + ": ";
        // Every single elimination any rule licenses on the original.
        for (auto rule : all_rules)
            for (auto x : inst.active_vars()) {
                if (is_var_rule(rule)) {
                    if (auto m = var_eliminable(inst, x, rule)) {
                        Instance copy = inst;
                        eliminate_variable(copy, x, rule, *m);
                        c.expect(is_satisfiable(copy) == sat, tag + std::string(rule_name(rule)) + " at " + std::to_string(x));
                        ++checked;
                    }
                    continue;
                }
                if (inst.domain_size(x) < 2)
                    continue;
                for (auto b : inst.domain(x))
                    if (auto m = val_eliminable(inst, x, b, rule)) {
                        Instance copy = inst;
                        auto step = eliminate_value(copy, x, b, rule, *m);
                        c.expect((! step.wipeout && is_satisfiable(copy)) == sat, tag + std::string(rule_name(rule)) + " removing " + std::to_string(b));
                        ++checked;
                    }
            }
        // Full runs, one rule at a time and all rules, checked after every step.
        std::vector<EngineConfig> configs;
        for (auto rule : all_rules) {
            EngineConfig cfg;
            cfg.rules = {rule};
            configs.push_back(cfg);
        }
        configs.emplace_back();
        configs.emplace_back().policy = PhasePolicy::interleaved;
        for (const auto & cfg : configs) {
            auto result = preprocess(inst, cfg);
            Instance state = inst;
            for (const auto & r : result.trace.records) {
                if (r.kind == RecordKind::var)
                    state.deactivate(r.var);
                else
                    state.remove_value(r.var, *r.val);
                if (r.kind != RecordKind::ac) {
                    c.expect(is_satisfiable(state) == sat, tag + "step " + std::string(rule_name(*r.rule)) + " changed satisfiability");
                    ++checked;
                }
            }
            c.expect(result.unsatisfiable ? ! sat : is_satisfiable(result.reduced) == sat, tag + "final state changed satisfiability");
        }
    }
    c.expect(checked > 10000, "too few eliminations exercised: " + std::to_string(checked));
    return checked;
}

auto criterion7(Check & c)
{
    for (const auto & name : fixture_names())
        for (const auto & why : verify_fixture(fixture(name)))
            c.expect(false, name + ": " + why);
}

// Compares occurs_at with brute_occurs for one pattern, instance and variable
// over every injective mapping; flat patterns without a distinguished
// variable are compared anywhere in the instance.
auto compare_occurrence(Check & c, const std::string & label, const Pattern & p, const Instance & inst, std::optional<VarId> only_x = std::nullopt,
    std::optional<ValueMapping> only_m = std::nullopt) -> std::size_t
{
    if (! p.distinguished_var()) {
        c.expect(occurs_in(p, inst).has_value() == brute_occurs_in(p, inst), label + " (anywhere)");
        return 1;
    }
    std::size_t n = 0;
    for (VarId x = 0; x < inst.var_count(); ++x) {
        if (only_x && x != *only_x)
            continue;
        auto maps = only_m ? std::vector<ValueMapping>{*only_m} : injective_mappings(p.existential(), inst.domain(x));
        for (const auto & m : maps) {
            bool fast = occurs_at(p, inst, x, m).has_value();
            bool brute = brute_occurs(p, inst, x, m);
            c.expect(fast == brute, label + " at " + std::to_string(x) + " m=" + format_mapping(m));
            ++n;
        }
    }
    return n;
}

auto criterion8(Check & c)
{
    std::size_t cases = 0;
    for (const auto & name : fixture_names()) {
        auto inst = fixture(name).instance;
        if (inst.max_domain_size() > 4)
            continue;
        for (const auto & entry : catalog())
            cases += compare_occurrence(c, entry.name + " on " + name, entry.pattern, inst);
    }
    std::mt19937_64 rng(8);
    const auto & cat = catalog();
    std::size_t random_cases = 0;
    for (std::uint64_t i = 0; random_cases < 10000; ++i) {
        auto inst = random_small(rng, 5, 3, 8000 + i);
        const auto & entry = cat[rng() % cat.size()];
        const auto & p = entry.pattern;
        std::optional<VarId> x;
        std::optional<ValueMapping> m;
        if (p.distinguished_var()) {
            x = VarId(rng() % inst.var_count());
            auto maps = injective_mappings(p.existential(), inst.domain(*x));
            if (maps.empty())
                continue;
            m = maps[rng() % maps.size()];
        }
        random_cases += compare_occurrence(c, entry.name + " on random " + std::to_string(i), p, inst, x, m);
    }
    return cases + random_cases;
}

auto criterion9(Check & c)
{
    for (auto name : {"BTP", "ExistsSubBTP", "ExistsInvSubBTP", "ExistsSnake", "Exists2Triangle", "Exists2InvSubBTP", "Exists2Snake"})
        c.expect(is_irreducible(get_pattern(name).pattern), std::string(name) + " is reducible");
    Pattern p2({{0, 1}, {0}, {0}});
    p2.set_cpt({2, 0}, {0, 0}, true);
    p2.set_cpt({1, 0}, {2, 0}, false);
    p2.set_cpt({1, 0}, {0, 1}, false);
    c.expect(! is_irreducible(p2), "P2 is irreducible");
}

// Every eliminated-variable set reachable by BTP in some order.
auto btp_terminal_sets(const Instance & inst) -> std::set<std::set<VarId>>
{
    std::set<std::set<VarId>> terminals, seen;
    std::function<void(Instance &, std::set<VarId> &)> rec = [&](Instance & state, std::set<VarId> & gone) {
        if (! seen.insert(gone).second)
            return;
        bool any = false;
        for (auto x : state.active_vars()) {
            if (! var_eliminable(state, x, Rule::BTP))
                continue;
            any = true;
            state.deactivate(x);
            gone.insert(x);
            rec(state, gone);
            gone.erase(x);
            state.activate(x);
        }
        if (! any)
            terminals.insert(gone);
    };
    Instance state = inst;
    std::set<VarId> gone;
    rec(state, gone);
    return terminals;
}

auto criterion10(Check & c)
{
    std::mt19937_64 rng(10);
    std::size_t nontrivial = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto inst = random_small(rng, 5, 3, 10000 + i);
        auto terminals = btp_terminal_sets(inst);
        c.expect(terminals.size() == 1, "instance " + std::to_string(i) + ": " + std::to_string(terminals.size()) + " distinct BTP closures");
        nontrivial += ! terminals.begin()->empty();
    }
    return nontrivial;
}

auto criterion11(Check & c)
{
    std::mt19937_64 rng(11);
    EngineConfig cfg;
    cfg.rules = {Rule::BTP, Rule::ExistsSubBTP, Rule::NS, Rule::Exists2Triangle};
    std::size_t done = 0, with_val = 0;
    for (std::uint64_t i = 0; done < 200; ++i) {
        // Denser draws than random_small, so value eliminations occur more often.
        std::size_t n = 2 + rng() % 4, d = 2 + rng() % 2;
        double density = 0.6 + 0.4 * double(rng() % 1000) / 1000.0;
        double tightness = 0.15 + 0.35 * double(rng() % 1000) / 1000.0;
        auto inst = random_instance(n, d, density, tightness, 11000 + i);
        auto expected = enumerate_solutions(inst);
        if (expected.empty())
            continue;
        ++done;
        auto result = preprocess(inst, cfg);
        c.expect(! result.unsatisfiable, "instance " + std::to_string(i) + ": preprocessing reported unsatisfiable");
        if (result.unsatisfiable)
            continue;
        with_val += ! records_of(result.trace, RecordKind::val).empty();
        auto got = recover_all(inst, result.trace, enumerate_solutions(result.reduced));
        c.expect(got == expected, "instance " + std::to_string(i) + ": recovered " + std::to_string(got.size()) + " of " +
                std::to_string(expected.size()) + " solutions");
    }
    return with_val;
}

template <class F>
auto median_seconds(int reps, F f) -> double
{
    std::vector<double> times;
    for (int r = 0; r < reps; ++r) {
        auto start = Clock::now();
        f();
        times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

auto criterion12(Check & c) -> std::string
{
    EngineConfig btp_only;
    btp_only.rules = {Rule::BTP};
    btp_only.val_elim = false;
    std::ostringstream detail;
    double previous = 0;
    for (std::size_t n = 500; n <= 8000; n *= 2) {
        auto tree = random_tree_instance(n, 4, n);
        auto result = preprocess(tree, btp_only);
        c.expect(result.reduced.active_count() <= 1, "tree n=" + std::to_string(n) + " not fully eliminated by BTP");
        Solution s(tree.var_count());
        for (auto v : result.reduced.active_vars())
            s[v] = result.reduced.domain(v).front();
        Solution full;
        double t = median_seconds(7, [&] { full = recover_one(tree, result.trace, s); });
        c.expect(is_solution(tree, full), "tree n=" + std::to_string(n) + " recovery invalid");
        detail << " n=" << n << ":" << std::round(t * 1e6) << "us";
        if (previous > 0)
            c.expect(t / previous <= 3.0, "recover_one time ratio " + std::to_string(t / previous) + " at n=" + std::to_string(n));
        previous = t;
    }
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto tree = random_tree_instance(200, 6, seed);
        auto start = Clock::now();
        auto result = preprocess(tree, btp_only);
        worst = std::max(worst, seconds_since(start));
        c.expect(result.reduced.active_count() <= 1, "BTP closure left variables at n=200");
    }
    c.expect(worst < 10.0, "BTP closure at n=200, d=6 took " + std::to_string(worst) + " s");
    detail << "; closure n=200 d=6: " << std::round(worst * 1000) << "ms";
    return detail.str();
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        const char * title;
        std::function<std::string(Check &)> run;
    };
    auto plain = [](auto f) { return [f](Check & c) { f(c); return std::string(); }; };
    std::vector<Criterion> criteria{
        {1, "K4 colouring: ∃2snake removes 1,2,3 from x1, AC gives singletons", plain(criterion1)},
        {2, "BOOL3: ∃2invsubBTP removes <x,0>, AC removes <y,1>, <z,0>", plain(criterion2)},
        {3, "K3 2-colouring: ∃2triangle removes <x1,1>, AC wipeout", plain(criterion3)},
        {4, "non-confluence of value elimination", plain(criterion4)},
        {5, "star graphs n=4..10 and centre elimination by ∃snake", plain(criterion5)},
        {6, "soundness sweep over 1000 random instances",
            [](Check & c) { return std::to_string(criterion6(c)) + " eliminations checked"; }},
        {7, "unsoundness fixtures verify", plain(criterion7)},
        {8, "occurs_at agrees with brute force", [](Check & c) { return std::to_string(criterion8(c)) + " queries"; }},
        {9, "irreducibility of the elimination patterns", plain(criterion9)},
        {10, "BTP closure is order independent",
            [](Check & c) { return std::to_string(criterion10(c)) + " instances with a nonempty closure"; }},
        {11, "recover_all equals oracle enumeration",
            [](Check & c) { return std::to_string(criterion11(c)) + " traces with value eliminations"; }},
        {12, "complexity smoke", criterion12},
    };
    bool all = true;
    for (const auto & crit : criteria) {
        Check check;
        std::string note;
        auto start = Clock::now();
        try {
            note = crit.run(check);
        }
        catch (const std::exception & e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        double secs = seconds_since(start);
        bool ok = check.failures.empty();
        all = all && ok;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << crit.id << ": " << crit.title << " (" << std::round(secs * 100) / 100 << " s"
                  << (note.empty() ? "" : "; " + note) << ")\n";
        for (const auto & why : check.failures)
            std::cout << "    " << why << '\n';
        if (check.suppressed)
            std::cout << "    ... " << check.suppressed << " more\n";
    }
    return all ? 0 : 1;
}
