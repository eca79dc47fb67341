#pragma once

// Text formats for instances and patterns.
//
// Instance:
//   bcsp 1
//   vars <n>
//   dom <i> : <v0> <v1> ...
//   con <i> <j>
//   <a> <b>
//   end
//
// Pattern:
//   pattern 1
//   vars <n>
//   dom <i> : <v0> ...
//   edge +|- <i> <a> <j> <b>
//   evar <i>
//   eval <i> <a>
//   dval <i> <a>
//
// `#` starts a comment. Pairs without a `con` block are unconstrained.

#include <cspprune/model.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace cspprune {

namespace detail {

    struct Token
    {
        std::string_view text;
        std::size_t column = 0; // 1-based
    };

    struct Line
    {
        std::size_t number = 0;
        std::vector<Token> tokens;
    };

    inline auto tokenize(std::string_view text) -> std::vector<Line>
    {
        std::vector<Line> lines;
        std::size_t number = 0;
        while (! text.empty() || number == 0) {
            ++number;
            auto end = text.find('\n');
            auto raw = text.substr(0, end);
            text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
            if (auto hash = raw.find('#'); hash != std::string_view::npos)
                raw = raw.substr(0, hash);
            Line line{number, {}};
            std::size_t i = 0;
            while (i < raw.size()) {
                while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r'))
                    ++i;
                std::size_t start = i;
                while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r')
                    ++i;
                if (i > start)
                    line.tokens.push_back({raw.substr(start, i - start), start + 1});
            }
            if (! line.tokens.empty())
                lines.push_back(std::move(line));
            if (text.empty())
                break;
        }
        return lines;
    }

    inline auto end_column(const Line & line) -> std::size_t
    {
        if (line.tokens.empty())
            return 1;
        const auto & last = line.tokens.back();
        return last.column + last.text.size();
    }

    inline auto parse_uint(const Line & line, std::size_t index, const char * what) -> std::uint32_t
    {
        if (index >= line.tokens.size())
            throw InputError(std::string("expected ") + what, line.number, end_column(line));
        const auto & tok = line.tokens[index];
        std::uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
        if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size())
            throw InputError(std::string("expected ") + what + ", found '" + std::string(tok.text) + "'", line.number, tok.column);
        return value;
    }

    inline void expect_count(const Line & line, std::size_t count)
    {
        if (line.tokens.size() > count)
            throw InputError("unexpected token '" + std::string(line.tokens[count].text) + "'", line.number, line.tokens[count].column);
        if (line.tokens.size() < count)
            throw InputError("line is incomplete", line.number, end_column(line));
    }

    inline void expect_header(const std::vector<Line> & lines, std::string_view keyword)
    {
        if (lines.empty())
            throw InputError("empty document", 1, 1);
        const auto & line = lines.front();
        if (line.tokens[0].text != keyword)
            throw InputError("expected '" + std::string(keyword) + " 1' header", line.number, line.tokens[0].column);
        if (parse_uint(line, 1, "format version") != 1)
            throw InputError("unsupported format version", line.number, line.tokens[1].column);
        expect_count(line, 2);
    }

    inline auto parse_vars(const std::vector<Line> & lines) -> std::size_t
    {
        if (lines.size() < 2 || lines[1].tokens[0].text != "vars")
            throw InputError("expected 'vars <n>'", lines.size() < 2 ? lines[0].number + 1 : lines[1].number, 1);
        auto n = parse_uint(lines[1], 1, "variable count");
        expect_count(lines[1], 2);
        return n;
    }

    // Parses `dom <i> : <values...>`.
    inline void parse_dom(const Line & line, std::vector<std::vector<Value>> & domains, std::vector<bool> & seen)
    {
        auto v = parse_uint(line, 1, "variable index");
        if (v >= domains.size())
            throw InputError("variable " + std::to_string(v) + " out of range", line.number, line.tokens[1].column);
        if (seen[v])
            throw InputError("second domain for variable " + std::to_string(v), line.number, line.tokens[0].column);
        if (line.tokens.size() < 3 || line.tokens[2].text != ":")
            throw InputError("expected ':' after the variable index", line.number, line.tokens.size() < 3 ? end_column(line) : line.tokens[2].column);
        if (line.tokens.size() == 3)
            throw InputError("variable " + std::to_string(v) + " has an empty domain", line.number, end_column(line));
        std::set<Value> values;
        for (std::size_t i = 3; i < line.tokens.size(); ++i) {
            auto a = parse_uint(line, i, "value");
            if (! values.insert(a).second)
                throw InputError("value " + std::to_string(a) + " listed twice", line.number, line.tokens[i].column);
        }
        domains[v].assign(values.begin(), values.end());
        seen[v] = true;
    }

    inline void require_domains(const std::vector<bool> & seen, std::size_t line)
    {
        for (std::size_t v = 0; v < seen.size(); ++v)
            if (! seen[v])
                throw InputError("variable " + std::to_string(v) + " has no 'dom' line", line, 1);
    }

} // namespace detail

inline auto parse_instance(std::string_view text) -> Instance
{
    auto lines = detail::tokenize(text);
    detail::expect_header(lines, "bcsp");
    auto n = detail::parse_vars(lines);
    std::vector<std::vector<Value>> domains(n);
    std::vector<bool> seen(n, false);
    std::vector<ConstraintSpec> constraints;
    std::set<std::pair<VarId, VarId>> pairs;

    std::size_t i = 2;
    for (; i < lines.size() && lines[i].tokens[0].text == "dom"; ++i)
        detail::parse_dom(lines[i], domains, seen);
    detail::require_domains(seen, i < lines.size() ? lines[i].number : (lines.back().number + 1));

    auto in_domain = [&](VarId v, Value a) { return std::binary_search(domains[v].begin(), domains[v].end(), a); };
    while (i < lines.size()) {
        const auto & head = lines[i];
        if (head.tokens[0].text == "dom")
            throw InputError("'dom' lines must precede constraints", head.number, head.tokens[0].column);
        if (head.tokens[0].text != "con")
            throw InputError("expected 'con', found '" + std::string(head.tokens[0].text) + "'", head.number, head.tokens[0].column);
        ConstraintSpec c;
        c.first = detail::parse_uint(head, 1, "variable index");
        c.second = detail::parse_uint(head, 2, "variable index");
        detail::expect_count(head, 3);
        for (auto [v, col] : {std::pair{c.first, head.tokens[1].column}, std::pair{c.second, head.tokens[2].column}})
            if (v >= n)
                throw InputError("variable " + std::to_string(v) + " out of range", head.number, col);
        if (c.first == c.second)
            throw InputError("constraint on a variable with itself", head.number, head.tokens[1].column);
        if (! pairs.emplace(std::min(c.first, c.second), std::max(c.first, c.second)).second)
            throw InputError("duplicate constraint on pair " + std::to_string(c.first) + " " + std::to_string(c.second), head.number,
                head.tokens[0].column);
        ++i;
        bool closed = false;
        for (; i < lines.size(); ++i) {
            const auto & line = lines[i];
            if (line.tokens[0].text == "end") {
                detail::expect_count(line, 1);
                closed = true;
                ++i;
                break;
            }
            auto a = detail::parse_uint(line, 0, "value");
            auto b = detail::parse_uint(line, 1, "value");
            detail::expect_count(line, 2);
            if (! in_domain(c.first, a))
                throw InputError("value " + std::to_string(a) + " is not in the domain of variable " + std::to_string(c.first), line.number,
                    line.tokens[0].column);
            if (! in_domain(c.second, b))
                throw InputError("value " + std::to_string(b) + " is not in the domain of variable " + std::to_string(c.second), line.number,
                    line.tokens[1].column);
            c.allowed.emplace_back(a, b);
        }
        if (! closed)
            throw InputError("constraint block is missing 'end'", head.number, head.tokens[0].column);
        constraints.push_back(std::move(c));
    }
    return Instance::make(domains, constraints);
}

/// Canonical text of an instance without eliminated variables. Removed
/// values are omitted.
inline auto serialize_instance(const Instance & inst) -> std::string
{
    if (inst.active_count() != inst.var_count())
        throw ContractViolation("cannot serialize an instance with eliminated variables");
    std::ostringstream out;
    out << "bcsp 1\nvars " << inst.var_count() << "\n";
    for (VarId v = 0; v < inst.var_count(); ++v) {
        out << "dom " << v << " :";
        for (auto a : inst.domain(v))
            out << ' ' << a;
        out << '\n';
    }
    for (VarId v = 0; v < inst.var_count(); ++v)
        for (const auto & arc : inst.arcs(v)) {
            if (arc.other < v)
                continue;
            out << "con " << v << ' ' << arc.other << '\n';
            for (auto a : inst.domain(v))
                for (auto b : inst.domain(arc.other))
                    if (inst.compatible(arc, a, b))
                        out << a << ' ' << b << '\n';
            out << "end\n";
        }
    return out.str();
}

/// 64-bit FNV-1a of the canonical serialization.
inline auto fingerprint(const Instance & inst) -> std::uint64_t
{
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char ch : serialize_instance(inst)) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    return hash;
}

inline auto parse_pattern(std::string_view text) -> Pattern
{
    auto lines = detail::tokenize(text);
    detail::expect_header(lines, "pattern");
    auto n = detail::parse_vars(lines);
    std::vector<std::vector<Value>> domains(n);
    std::vector<bool> seen(n, false);
    std::size_t i = 2;
    for (; i < lines.size() && lines[i].tokens[0].text == "dom"; ++i)
        detail::parse_dom(lines[i], domains, seen);
    detail::require_domains(seen, i < lines.size() ? lines[i].number : (lines.back().number + 1));

    Pattern p(domains);
    std::optional<VarId> evar;
    std::vector<std::pair<const detail::Line *, Value>> evals;
    std::optional<std::pair<const detail::Line *, Value>> dval;

    auto check_assignment = [&](const detail::Line & line, std::size_t index) -> Assignment {
        auto v = detail::parse_uint(line, index, "variable index");
        if (v >= n)
            throw InputError("variable " + std::to_string(v) + " out of range", line.number, line.tokens[index].column);
        auto a = detail::parse_uint(line, index + 1, "value");
        if (! p.has_value(v, a))
            throw InputError("value " + std::to_string(a) + " is not in the domain of variable " + std::to_string(v), line.number,
                line.tokens[index + 1].column);
        return {v, a};
    };

    for (; i < lines.size(); ++i) {
        const auto & line = lines[i];
        auto keyword = line.tokens[0].text;
        if (keyword == "edge") {
            detail::expect_count(line, 6);
            auto sign = line.tokens[1].text;
            if (sign != "+" && sign != "-")
                throw InputError("edge sign must be '+' or '-'", line.number, line.tokens[1].column);
            auto first = check_assignment(line, 2);
            auto second = check_assignment(line, 4);
            if (first.var == second.var)
                throw InputError("edge between two values of one variable", line.number, line.tokens[4].column);
            if (p.cpt(first, second))
                throw InputError("edge defined twice", line.number, line.tokens[0].column);
            p.set_cpt(first, second, sign == "+");
        }
        else if (keyword == "evar") {
            detail::expect_count(line, 2);
            if (evar)
                throw InputError("second 'evar' line", line.number, line.tokens[0].column);
            auto v = detail::parse_uint(line, 1, "variable index");
            if (v >= n)
                throw InputError("variable " + std::to_string(v) + " out of range", line.number, line.tokens[1].column);
            evar = v;
        }
        else if (keyword == "eval") {
            detail::expect_count(line, 3);
            auto a = check_assignment(line, 1);
            if (! evar || *evar != a.var)
                throw InputError("existential value on a variable that is not the 'evar'", line.number, line.tokens[1].column);
            evals.emplace_back(&line, a.val);
        }
        else if (keyword == "dval") {
            detail::expect_count(line, 3);
            if (dval)
                throw InputError("second 'dval' line", line.number, line.tokens[0].column);
            auto a = check_assignment(line, 1);
            if (! evar || *evar != a.var)
                throw InputError("distinguished value on a variable that is not the 'evar'", line.number, line.tokens[1].column);
            dval = std::pair{&line, a.val};
        }
        else {
            throw InputError("unknown keyword '" + std::string(keyword) + "'", line.number, line.tokens[0].column);
        }
    }

    if (evar) {
        std::vector<Value> existential;
        for (const auto & [line, a] : evals)
            existential.push_back(a);
        std::optional<Value> distinguished;
        if (dval) {
            if (std::find(existential.begin(), existential.end(), dval->second) == existential.end())
                throw InputError("distinguished value must also be listed with 'eval'", dval->first->number, dval->first->tokens[2].column);
            distinguished = dval->second;
        }
        p.quantify(*evar, existential, distinguished);
    }
    return p;
}

inline auto serialize_pattern(const Pattern & p) -> std::string
{
    std::ostringstream out;
    out << "pattern 1\nvars " << p.var_count() << "\n";
    for (VarId v = 0; v < p.var_count(); ++v) {
        out << "dom " << v << " :";
        for (auto a : p.domain(v))
            out << ' ' << a;
        out << '\n';
    }
    for (const auto & [edge, value] : p.edges())
        out << "edge " << (value ? '+' : '-') << ' ' << edge.first.var << ' ' << edge.first.val << ' ' << edge.second.var << ' '
            << edge.second.val << '\n';
    if (auto v = p.distinguished_var()) {
        out << "evar " << *v << '\n';
        for (auto a : p.existential())
            out << "eval " << *v << ' ' << a << '\n';
        if (auto b = p.distinguished_val())
            out << "dval " << *v << ' ' << *b << '\n';
    }
    return out.str();
}

inline auto read_file(const std::string & path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::string & path, const std::string & text)
{
    std::ofstream out(path, std::ios::binary);
    if (! out || ! (out << text))
        throw InputError("cannot write '" + path + "'");
}

} // namespace cspprune
