#pragma once

// Command-line front end. Exit status: 0 satisfiable or success, 1
// unsatisfiable or failed verification, 2 usage or input error.

#include <cspprune/catalog.hpp>
#include <cspprune/engine.hpp>
#include <cspprune/fixtures.hpp>
#include <cspprune/io.hpp>
#include <cspprune/oracle.hpp>
#include <cspprune/reconstruction.hpp>
#include <cspprune/trace.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace cspprune::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_unsat = 1;
inline constexpr int exit_usage = 2;

namespace detail {

    inline auto split(const std::string & text, char sep) -> std::vector<std::string>
    {
        std::vector<std::string> parts;
        std::string current;
        for (char ch : text) {
            if (ch == sep) {
                parts.push_back(current);
                current.clear();
            }
            else {
                current += ch;
            }
        }
        parts.push_back(current);
        return parts;
    }

    inline auto to_uint(const std::string & text, const std::string & what) -> std::uint32_t
    {
        std::uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
            throw InputError("bad " + what + " '" + text + "'");
        return value;
    }

    inline auto to_int(const std::string & text, const std::string & what) -> std::int64_t
    {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
            throw InputError("bad " + what + " '" + text + "'");
        return value;
    }

    inline auto parse_rules(const std::string & csv) -> std::vector<Rule>
    {
        std::vector<Rule> rules;
        for (const auto & item : split(csv, ','))
            if (! item.empty())
                rules.push_back(parse_rule(item));
        if (rules.empty())
            throw InputError("--rules names no rule");
        return rules;
    }

    // explicit:<step>;<step>... with steps val:<x>:<b>[:<rule>[:<d>]] or var:<x>[:<rule>[:<d>]]
    inline auto parse_order(const std::string & text) -> std::vector<ScriptStep>
    {
        if (text == "canonical")
            return {};
        const std::string prefix = "explicit:";
        if (text.rfind(prefix, 0) != 0)
            throw InputError("--order must be 'canonical' or 'explicit:<script>'");
        std::vector<ScriptStep> steps;
        for (const auto & item : split(text.substr(prefix.size()), ';')) {
            if (item.empty())
                continue;
            auto fields = split(item, ':');
            ScriptStep step;
            std::size_t next = 0;
            if (fields[0] == "val" && fields.size() >= 3 && fields.size() <= 5) {
                step.kind = RecordKind::val;
                step.var = to_uint(fields[1], "variable");
                step.val = to_uint(fields[2], "value");
                next = 3;
            }
            else if (fields[0] == "var" && fields.size() >= 2 && fields.size() <= 4) {
                step.kind = RecordKind::var;
                step.var = to_uint(fields[1], "variable");
                next = 2;
            }
            else {
                throw InputError("bad scripted step '" + item + "'");
            }
            if (next < fields.size() && ! fields[next].empty())
                step.rule = parse_rule(fields[next]);
            if (next + 1 < fields.size())
                step.partner = to_uint(fields[next + 1], "partner value");
            steps.push_back(step);
        }
        return steps;
    }

    // a=<v>,b=<v>; keys may also be raw pattern values.
    inline auto parse_map(const std::string & text) -> ValueMapping
    {
        ValueMapping m;
        for (const auto & item : split(text, ',')) {
            if (item.empty())
                continue;
            auto eq = item.find('=');
            if (eq == std::string::npos)
                throw InputError("bad --map entry '" + item + "'");
            auto key = item.substr(0, eq);
            Value from = key == "a" ? 0 : key == "b" ? 1 : to_uint(key, "pattern value");
            if (! m.emplace(from, to_uint(item.substr(eq + 1), "value")).second)
                throw InputError("pattern value mapped twice in --map");
        }
        return m;
    }

    inline auto load_instance(const std::string & path) -> Instance { return parse_instance(read_file(path)); }

    inline auto load_pattern(const std::string & spec) -> Pattern
    {
        if (auto entry = find_pattern(spec))
            return entry->pattern;
        if (std::filesystem::exists(spec))
            return parse_pattern(read_file(spec));
        throw InputError("'" + spec + "' is neither a catalog pattern nor a readable file");
    }

    inline auto format_solution(const Solution & s) -> std::string
    {
        std::string text;
        for (VarId v = 0; v < s.size(); ++v)
            if (s[v]) {
                if (! text.empty())
                    text += ' ';
                text += std::to_string(v) + '=' + std::to_string(*s[v]);
            }
        return text;
    }

    inline auto format_domains(const Instance & inst) -> std::string
    {
        std::string text;
        for (auto v : inst.active_vars()) {
            if (! text.empty())
                text += ' ';
            text += std::to_string(v) + ":{";
            bool first = true;
            for (auto a : inst.domain(v)) {
                text += (first ? "" : ",") + std::to_string(a);
                first = false;
            }
            text += '}';
        }
        return text;
    }

    inline auto elapsed_ms(std::chrono::steady_clock::time_point since) -> double
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
    }

    inline void report_preprocess(std::ostream & out, const Instance & original, const PreprocessResult & result)
    {
        std::map<Rule, std::size_t> var_tally, val_tally;
        std::size_t ac = 0;
        for (const auto & r : result.trace.records) {
            if (r.kind == RecordKind::var)
                ++var_tally[*r.rule];
            else if (r.kind == RecordKind::val)
                ++val_tally[*r.rule];
            else
                ++ac;
        }
        auto tally = [](const std::map<Rule, std::size_t> & t) {
            std::size_t total = 0;
            std::string detail;
            for (const auto & [rule, count] : t) {
                total += count;
                detail += (detail.empty() ? "" : ", ") + std::string(rule_display(rule)) + " " + std::to_string(count);
            }
            return std::to_string(total) + (detail.empty() ? "" : " (" + detail + ")");
        };
        out << "variables: " << original.var_count() << " -> " << result.reduced.active_count() << '\n';
        out << "var-elim: " << tally(var_tally) << '\n';
        out << "val-elim: " << tally(val_tally) << '\n';
        out << "ac: " << ac << '\n';
        if (result.unsatisfiable) {
            out << "status: unsatisfiable (domain wipeout at variable " << *result.wipeout << ")\n";
            return;
        }
        auto active = result.reduced.active_vars();
        bool singletons = std::all_of(active.begin(), active.end(), [&](VarId v) { return result.reduced.domain_size(v) == 1; });
        out << "status: reduced\n";
        out << "final domains: " << (active.empty() ? "none" : singletons ? "singleton" : "mixed") << '\n';
        out << "domains: " << format_domains(result.reduced) << '\n';
    }

    struct EngineFlags
    {
        std::string rules;
        bool no_var = false;
        bool no_val = false;
        std::string order = "canonical";
        std::string policy = "var-first";

        void add(CLI::App & app)
        {
            app.add_option("--rules", rules, "comma-separated rules to enable (default: all)");
            app.add_flag("--no-var", no_var, "disable variable elimination");
            app.add_flag("--no-val", no_val, "disable value elimination");
            app.add_option("--order", order, "canonical, or explicit:<step>;... with val:<x>:<b>[:<rule>[:<d>]] or var:<x>[:<rule>[:<d>]]");
            app.add_option("--policy", policy, "var-first or interleaved");
        }

        auto config() const -> EngineConfig
        {
            EngineConfig cfg;
            if (! rules.empty())
                cfg.rules = parse_rules(rules);
            cfg.var_elim = ! no_var;
            cfg.val_elim = ! no_val;
            cfg.script = parse_order(order);
            if (policy == "var-first")
                cfg.policy = PhasePolicy::var_first;
            else if (policy == "interleaved")
                cfg.policy = PhasePolicy::interleaved;
            else
                throw InputError("--policy must be var-first or interleaved");
            return cfg;
        }
    };

    // Oracle agreement for one instance: every trace step preserves
    // satisfiability and the reconstructed solution is valid.
    inline auto verify_instance(const Instance & inst, const EngineConfig & cfg, std::ostream & out, const std::string & label) -> bool
    {
        bool ok = true;
        auto fail = [&](const std::string & why) {
            out << "FAIL " << label << ": " << why << '\n';
            ok = false;
        };
        bool sat = is_satisfiable(inst);
        auto result = preprocess(inst, cfg);
        if (result.unsatisfiable && sat)
            fail("preprocessing reports a satisfiable instance as unsatisfiable");
        Instance state = inst;
        for (const auto & r : result.trace.records) {
            if (r.kind == RecordKind::var)
                state.deactivate(r.var);
            else
                state.remove_value(r.var, *r.val);
            if (r.kind != RecordKind::ac && is_satisfiable(state) != sat)
                fail("step on variable " + std::to_string(r.var) + " by " + std::string(rule_name(*r.rule)) + " changed satisfiability");
        }
        if (! result.unsatisfiable) {
            auto s = solve(result.reduced);
            if (s.has_value() != sat)
                fail("reduced instance has the wrong satisfiability");
            if (s) {
                auto full = recover_one(inst, result.trace, *s);
                if (! is_solution(inst, full))
                    fail("reconstructed assignment is not a solution");
            }
        }
        return ok;
    }

} // namespace detail

inline auto run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err) -> int
{
    CLI::App app{"Binary CSP preprocessing by forbidden patterns", "cspprune"};
    app.require_subcommand(1);

    std::string input, trace_path, pattern_spec, map_text, output, show;
    std::optional<VarId> at;
    bool with_preprocess = false, reconstruct = false;
    std::vector<std::string> gen_args;
    detail::EngineFlags flags;

    auto * pre = app.add_subcommand("preprocess", "eliminate variables and values; print a report");
    pre->add_option("instance", input, "instance file")->required();
    pre->add_option("--trace", trace_path, "write the elimination trace here");
    flags.add(*pre);

    auto * sol = app.add_subcommand("solve", "solve an instance");
    sol->add_option("instance", input, "instance file")->required();
    sol->add_flag("--preprocess", with_preprocess, "preprocess before searching");
    sol->add_flag("--reconstruct", reconstruct, "map the reduced solution back to the original instance");
    flags.add(*sol);

    auto * cnt = app.add_subcommand("count", "count solutions with the brute-force oracle");
    cnt->add_option("instance", input, "instance file")->required();

    auto * chk = app.add_subcommand("check", "look for a pattern occurrence");
    chk->add_option("instance", input, "instance file")->required();
    chk->add_option("--pattern", pattern_spec, "catalog name or pattern file")->required();
    chk->add_option("--at", at, "variable the distinguished variable maps to");
    chk->add_option("--map", map_text, "existential value mapping, e.g. a=0,b=1");

    auto * ver = app.add_subcommand("verify", "check the engine against the oracle (all fixtures when no file is given)");
    ver->add_option("instance", input, "instance file");
    flags.add(*ver);

    auto * gen = app.add_subcommand("gen", "write a fixture, or 'random n d density tightness seed', or 'tree n d seed'");
    gen->add_option("what", gen_args, "fixture name and parameters")->required();
    gen->add_option("-o,--output", output, "output file (default: standard output)");

    auto * cat = app.add_subcommand("catalog", "list catalog patterns");
    cat->add_option("--show", show, "print one pattern in the pattern format");

    std::vector<const char *> argv{"cspprune"};
    for (const auto & a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    }
    catch (const CLI::ParseError & e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (pre->parsed()) {
            auto inst = detail::load_instance(input);
            auto start = std::chrono::steady_clock::now();
            auto result = preprocess(inst, flags.config());
            double ms = detail::elapsed_ms(start);
            detail::report_preprocess(out, inst, result);
            if (! trace_path.empty()) {
                write_file(trace_path, serialize_trace(result.trace));
                out << "trace: " << trace_path << '\n';
            }
            out << "time: " << ms << " ms\n";
            return result.unsatisfiable ? exit_unsat : exit_ok;
        }
        if (sol->parsed()) {
            auto inst = detail::load_instance(input);
            if (reconstruct && ! with_preprocess)
                throw InputError("--reconstruct needs --preprocess");
            if (! with_preprocess) {
                auto s = solve(inst);
                out << (s ? "solution: " + detail::format_solution(*s) : std::string("unsatisfiable")) << '\n';
                return s ? exit_ok : exit_unsat;
            }
            auto result = preprocess(inst, flags.config());
            if (result.unsatisfiable) {
                out << "unsatisfiable (wipeout at variable " << *result.wipeout << " during preprocessing)\n";
                return exit_unsat;
            }
            auto s = solve(result.reduced);
            if (! s) {
                out << "unsatisfiable\n";
                return exit_unsat;
            }
            if (! reconstruct) {
                out << "reduced solution: " << detail::format_solution(*s) << '\n';
                return exit_ok;
            }
            auto full = recover_one(inst, result.trace, *s);
            if (! is_solution(inst, full))
                throw SoundnessFailure("reconstructed assignment fails the original instance");
            out << "solution: " << detail::format_solution(full) << '\n';
            return exit_ok;
        }
        if (cnt->parsed()) {
            auto n = count_solutions(detail::load_instance(input));
            out << "solutions: " << n << '\n';
            return n ? exit_ok : exit_unsat;
        }
        if (chk->parsed()) {
            auto inst = detail::load_instance(input);
            auto p = detail::load_pattern(pattern_spec);
            std::optional<OccurrenceWitness> w;
            if (at) {
                auto m = detail::parse_map(map_text);
                w = occurs_at(p, inst, *at, m);
            }
            else {
                if (! map_text.empty())
                    throw InputError("--map needs --at");
                w = occurs_in(p, inst);
            }
            if (! w) {
                out << "no occurrence\n";
                return exit_ok;
            }
            out << "occurrence:";
            for (VarId v = 0; v < p.var_count(); ++v) {
                out << ' ' << v << "->" << w->phi[v] << " {";
                bool first = true;
                for (const auto & [a, b] : w->psi[v]) {
                    out << (first ? "" : ",") << a << "->" << b;
                    first = false;
                }
                out << '}';
            }
            out << '\n';
            return exit_ok;
        }
        if (ver->parsed()) {
            auto cfg = flags.config();
            if (! input.empty()) {
                bool ok = detail::verify_instance(detail::load_instance(input), cfg, out, input);
                out << (ok ? "verified\n" : "verification failed\n");
                return ok ? exit_ok : exit_unsat;
            }
            bool all = true;
            for (const auto & name : fixture_names()) {
                auto f = fixture(name);
                auto failures = verify_fixture(f);
                for (const auto & why : failures)
                    out << "FAIL " << name << ": " << why << '\n';
                bool ok = failures.empty() && detail::verify_instance(f.instance, cfg, out, name);
                out << (ok ? "ok   " : "FAIL ") << name << '\n';
                all = all && ok;
            }
            return all ? exit_ok : exit_unsat;
        }
        if (gen->parsed()) {
            const auto & what = gen_args.front();
            std::vector<std::string> rest(gen_args.begin() + 1, gen_args.end());
            Instance inst;
            if (what == "random") {
                if (rest.size() != 5)
                    throw InputError("usage: gen random <n> <d> <density> <tightness> <seed>");
                inst = random_instance(detail::to_uint(rest[0], "n"), detail::to_uint(rest[1], "d"), std::stod(rest[2]), std::stod(rest[3]),
                    std::uint64_t(detail::to_int(rest[4], "seed")));
            }
            else if (what == "tree") {
                if (rest.size() != 3)
                    throw InputError("usage: gen tree <n> <d> <seed>");
                inst = random_tree_instance(
                    detail::to_uint(rest[0], "n"), detail::to_uint(rest[1], "d"), std::uint64_t(detail::to_int(rest[2], "seed")));
            }
            else {
                std::vector<std::int64_t> params;
                for (const auto & r : rest)
                    params.push_back(detail::to_int(r, "parameter"));
                inst = fixture(what, params).instance;
            }
            auto text = serialize_instance(inst);
            if (output.empty())
                out << text;
            else
                write_file(output, text);
            return exit_ok;
        }
        if (cat->parsed()) {
            if (! show.empty()) {
                out << serialize_pattern(get_pattern(show).pattern);
                return exit_ok;
            }
            auto listing = list_catalog();
            auto line = [&](const char * label, const std::vector<std::string> & names) {
                out << label << ':';
                for (const auto & n : names)
                    out << ' ' << n;
                out << '\n';
            };
            line("var-elim", listing.var_elim);
            line("val-elim", listing.val_elim);
            line("auxiliary", listing.auxiliary);
            line("non-elim", listing.non_elim);
            return exit_ok;
        }
    }
    catch (const InputError & e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const ContractViolation & e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const SizeLimitExceeded & e) {
        err << "error: " << e.what() << " (raise CSPPRUNE_NODE_LIMIT to allow more)\n";
        return exit_usage;
    }
    catch (const std::invalid_argument & e) {
        err << "error: bad number\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace cspprune::cli
