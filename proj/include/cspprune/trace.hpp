#pragma once

// Elimination rules and the replayable trace of a preprocessing run.
//
// Trace text:
//   bcsp-trace 1 <fingerprint>
//   var <x> rule=<R> m=<a>:<d>
//   val <x> <b> rule=<R> m=<a>:<d>,<b'>:<b>
//   ac <x> <v>
// A flat rule writes `m=` with nothing after it.

#include <cspprune/io.hpp>
#include <cspprune/model.hpp>
#include <cspprune/pattern_algebra.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace cspprune {

/// Canonical rule order: variable rules first, then value rules.
enum class Rule : std::uint8_t
{
    BTP,
    ExistsSubBTP,
    ExistsInvSubBTP,
    ExistsSnake,
    NS,
    Exists2Triangle,
    Exists2InvSubBTP,
    Exists2Snake,
};

inline constexpr std::array<Rule, 8> all_rules = {Rule::BTP, Rule::ExistsSubBTP, Rule::ExistsInvSubBTP, Rule::ExistsSnake, Rule::NS,
    Rule::Exists2Triangle, Rule::Exists2InvSubBTP, Rule::Exists2Snake};

inline auto is_var_rule(Rule r) -> bool { return r <= Rule::ExistsSnake; }
inline auto is_val_rule(Rule r) -> bool { return r >= Rule::NS; }

/// Catalog name of the rule's pattern.
inline auto rule_name(Rule r) -> std::string_view
{
    switch (r) {
    case Rule::BTP: return "BTP";
    case Rule::ExistsSubBTP: return "ExistsSubBTP";
    case Rule::ExistsInvSubBTP: return "ExistsInvSubBTP";
    case Rule::ExistsSnake: return "ExistsSnake";
    case Rule::NS: return "NS";
    case Rule::Exists2Triangle: return "Exists2Triangle";
    case Rule::Exists2InvSubBTP: return "Exists2InvSubBTP";
    case Rule::Exists2Snake: return "Exists2Snake";
    }
    return "?";
}

inline auto rule_display(Rule r) -> std::string_view
{
    switch (r) {
    case Rule::BTP: return "BTP";
    case Rule::ExistsSubBTP: return "∃subBTP";
    case Rule::ExistsInvSubBTP: return "∃invsubBTP";
    case Rule::ExistsSnake: return "∃snake";
    case Rule::NS: return "NS";
    case Rule::Exists2Triangle: return "∃2triangle";
    case Rule::Exists2InvSubBTP: return "∃2invsubBTP";
    case Rule::Exists2Snake: return "∃2snake";
    }
    return "?";
}

/// Accepts either spelling.
inline auto parse_rule(std::string_view text) -> Rule
{
    for (auto r : all_rules)
        if (text == rule_name(r) || text == rule_display(r))
            return r;
    throw InputError("unknown rule '" + std::string(text) + "'");
}

enum class RecordKind : std::uint8_t
{
    var,
    val,
    ac,
};

struct ElimRecord
{
    RecordKind kind = RecordKind::ac;
    VarId var = 0;
    std::optional<Value> val;  // val and ac records
    std::optional<Rule> rule;  // var and val records
    ValueMapping mapping;      // pattern value -> instance value
    std::vector<Value> domain; // var records: live domain of x when it was eliminated

    friend auto operator==(const ElimRecord &, const ElimRecord &) -> bool = default;
};

struct EliminationTrace
{
    std::uint64_t fingerprint = 0; // of the original instance
    std::vector<ElimRecord> records;

    friend auto operator==(const EliminationTrace &, const EliminationTrace &) -> bool = default;
};

inline auto format_mapping(const ValueMapping & m) -> std::string
{
    std::string text;
    for (const auto & [from, to] : m) {
        if (! text.empty())
            text += ',';
        text += std::to_string(from) + ':' + std::to_string(to);
    }
    return text;
}

inline auto serialize_trace(const EliminationTrace & trace) -> std::string
{
    std::ostringstream out;
    out << "bcsp-trace 1 " << trace.fingerprint << '\n';
    for (const auto & r : trace.records) {
        switch (r.kind) {
        case RecordKind::var: out << "var " << r.var << " rule=" << rule_name(*r.rule) << " m=" << format_mapping(r.mapping) << '\n'; break;
        case RecordKind::val:
            out << "val " << r.var << ' ' << *r.val << " rule=" << rule_name(*r.rule) << " m=" << format_mapping(r.mapping) << '\n';
            break;
        case RecordKind::ac: out << "ac " << r.var << ' ' << *r.val << '\n'; break;
        }
    }
    return out.str();
}

/// Parses trace text. The `domain` field of var records is not part of the
/// text and is left empty.
inline auto parse_trace(std::string_view text) -> EliminationTrace
{
    auto lines = detail::tokenize(text);
    if (lines.empty() || lines[0].tokens[0].text != "bcsp-trace")
        throw InputError("expected 'bcsp-trace 1 <fingerprint>' header", lines.empty() ? 1 : lines[0].number, 1);
    const auto & head = lines[0];
    if (detail::parse_uint(head, 1, "format version") != 1)
        throw InputError("unsupported trace version", head.number, head.tokens[1].column);
    if (head.tokens.size() < 3)
        throw InputError("missing fingerprint", head.number, detail::end_column(head));
    detail::expect_count(head, 3);
    EliminationTrace trace;
    {
        const auto & tok = head.tokens[2];
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), trace.fingerprint);
        if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size())
            throw InputError("bad fingerprint", head.number, tok.column);
    }

    auto field = [](const detail::Line & line, std::size_t index, std::string_view key) -> std::string_view {
        if (index >= line.tokens.size())
            throw InputError("expected '" + std::string(key) + "'", line.number, detail::end_column(line));
        auto tok = line.tokens[index].text;
        if (tok.substr(0, key.size()) != key)
            throw InputError("expected '" + std::string(key) + "'", line.number, line.tokens[index].column);
        return tok.substr(key.size());
    };
    auto parse_mapping = [](const detail::Line & line, std::size_t index, std::string_view text) {
        ValueMapping m;
        while (! text.empty()) {
            auto comma = text.find(',');
            auto item = text.substr(0, comma);
            text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
            auto colon = item.find(':');
            Value from = 0, to = 0;
            bool ok = colon != std::string_view::npos;
            if (ok) {
                auto r1 = std::from_chars(item.data(), item.data() + colon, from);
                auto r2 = std::from_chars(item.data() + colon + 1, item.data() + item.size(), to);
                ok = r1.ec == std::errc{} && r1.ptr == item.data() + colon && r2.ec == std::errc{} && r2.ptr == item.data() + item.size();
            }
            if (! ok || ! m.emplace(from, to).second)
                throw InputError("bad value mapping", line.number, line.tokens[index].column);
        }
        return m;
    };

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto & line = lines[i];
        auto kind = line.tokens[0].text;
        ElimRecord r;
        if (kind == "var") {
            detail::expect_count(line, 4);
            r.kind = RecordKind::var;
            r.var = detail::parse_uint(line, 1, "variable index");
            try {
                r.rule = parse_rule(field(line, 2, "rule="));
            }
            catch (const InputError & e) {
                throw InputError(e.what(), line.number, line.tokens[2].column);
            }
            if (! is_var_rule(*r.rule))
                throw InputError("var record with a value rule", line.number, line.tokens[2].column);
            r.mapping = parse_mapping(line, 3, field(line, 3, "m="));
        }
        else if (kind == "val") {
            detail::expect_count(line, 5);
            r.kind = RecordKind::val;
            r.var = detail::parse_uint(line, 1, "variable index");
            r.val = detail::parse_uint(line, 2, "value");
            try {
                r.rule = parse_rule(field(line, 3, "rule="));
            }
            catch (const InputError & e) {
                throw InputError(e.what(), line.number, line.tokens[3].column);
            }
            if (! is_val_rule(*r.rule))
                throw InputError("val record with a variable rule", line.number, line.tokens[3].column);
            r.mapping = parse_mapping(line, 4, field(line, 4, "m="));
        }
        else if (kind == "ac") {
            detail::expect_count(line, 3);
            r.kind = RecordKind::ac;
            r.var = detail::parse_uint(line, 1, "variable index");
            r.val = detail::parse_uint(line, 2, "value");
        }
        else {
            throw InputError("unknown record '" + std::string(kind) + "'", line.number, line.tokens[0].column);
        }
        trace.records.push_back(std::move(r));
    }
    return trace;
}

} // namespace cspprune
