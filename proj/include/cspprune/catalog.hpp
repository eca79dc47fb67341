#pragma once

// Named patterns: the four variable-elimination patterns, the value
// elimination patterns (neighbourhood substitution and its three
// generalisations), and the non-elimination patterns used by the
// counterexample fixtures.
//
// Conventions: x is variable 0 and always the distinguished variable, y is 1,
// z is 2. On x, value 0 is `a` and value 1 is `b`; on a two-valued y, value 0
// is `p` and value 1 is `q`.

#include <cspprune/model.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cspprune {

enum class PatternKind
{
    var_elim,
    val_elim,
    non_elim_fixture,
};

struct CatalogEntry
{
    std::string name;    // ASCII identifier, e.g. ExistsSnake
    std::string display; // conventional spelling, e.g. ∃snake
    PatternKind kind;
    bool principal; // one of the 4 var-elim / 3 val-elim / 20 fixture patterns
    Pattern pattern;
};

struct CatalogListing
{
    std::vector<std::string> var_elim;   // BTP, ExistsSubBTP, ExistsInvSubBTP, ExistsSnake
    std::vector<std::string> val_elim;   // Exists2Triangle, Exists2InvSubBTP, Exists2Snake
    std::vector<std::string> non_elim;   // the 20 counterexample patterns
    std::vector<std::string> auxiliary;  // InvSubBTP, Snake, NS
};

namespace detail {

    class PatternBuilder
    {
    public:
        explicit PatternBuilder(std::vector<std::vector<Value>> domains) : pattern_(std::move(domains)) {}

        auto compat(VarId v, Value a, VarId w, Value b) -> PatternBuilder &
        {
            pattern_.set_cpt({v, a}, {w, b}, true);
            return *this;
        }

        auto incompat(VarId v, Value a, VarId w, Value b) -> PatternBuilder &
        {
            pattern_.set_cpt({v, a}, {w, b}, false);
            return *this;
        }

        auto at(VarId v, std::vector<Value> existential = {}, std::optional<Value> distinguished = std::nullopt) -> PatternBuilder &
        {
            pattern_.quantify(v, std::move(existential), distinguished);
            return *this;
        }

        auto build() const -> Pattern { return pattern_; }

    private:
        Pattern pattern_;
    };

    constexpr VarId X = 0, Y = 1, Z = 2;

    inline auto build_catalog() -> std::vector<CatalogEntry>
    {
        using B = PatternBuilder;
        std::vector<CatalogEntry> c;
        auto add = [&](std::string name, std::string display, PatternKind kind, bool principal, Pattern p) {
            p.validate();
            c.push_back(CatalogEntry{std::move(name), std::move(display), kind, principal, std::move(p)});
        };
        auto var = PatternKind::var_elim;
        auto val = PatternKind::val_elim;
        auto non = PatternKind::non_elim_fixture;

        // Variable elimination.
        add("BTP", "BTP", var, true,
            B({{0, 1}, {0}, {0}}).compat(Y, 0, Z, 0).compat(Y, 0, X, 1).compat(Z, 0, X, 0).incompat(Y, 0, X, 0).incompat(Z, 0, X, 1).at(X).build());
        add("ExistsSubBTP", "∃subBTP", var, true,
            B({{0, 1}, {0}, {0}}).compat(Y, 0, Z, 0).compat(Y, 0, X, 1).incompat(Y, 0, X, 0).incompat(Z, 0, X, 1).at(X, {0}).build());
        add("ExistsInvSubBTP", "∃invsubBTP", var, true,
            B({{0}, {0, 1}, {0}}).compat(Y, 1, X, 0).compat(Z, 0, X, 0).incompat(Y, 0, X, 0).incompat(Z, 0, Y, 1).at(X, {0}).build());
        add("ExistsSnake", "∃snake", var, true,
            B({{0}, {0, 1}, {0}}).compat(Y, 1, X, 0).compat(Y, 0, Z, 0).incompat(Y, 0, X, 0).incompat(Z, 0, Y, 1).at(X, {0}).build());
        add("InvSubBTP", "invsubBTP", var, false,
            B({{0}, {0, 1}, {0}}).compat(Y, 1, X, 0).compat(Z, 0, X, 0).incompat(Y, 0, X, 0).incompat(Z, 0, Y, 1).at(X).build());
        add("Snake", "snake", var, false,
            B({{0}, {0, 1}, {0}}).compat(Y, 1, X, 0).compat(Y, 0, Z, 0).incompat(Y, 0, X, 0).incompat(Z, 0, Y, 1).at(X).build());

        // Value elimination.
        add("NS", "NS", val, false, B({{0, 1}, {0}}).compat(Y, 0, X, 1).incompat(Y, 0, X, 0).at(X, {0, 1}, 1).build());
        add("Exists2Triangle", "∃2triangle", val, true,
            B({{0, 1}, {0}, {0}}).compat(Y, 0, Z, 0).compat(Y, 0, X, 1).compat(Z, 0, X, 1).incompat(Y, 0, X, 0).at(X, {0, 1}, 1).build());
        add("Exists2InvSubBTP", "∃2invsubBTP", val, true,
            B({{0, 1}, {0, 1}, {0}})
                .compat(Y, 0, X, 1)
                .compat(Y, 1, X, 0)
                .compat(Z, 0, X, 0)
                .incompat(Y, 0, X, 0)
                .incompat(Z, 0, Y, 1)
                .at(X, {0, 1}, 1)
                .build());
        add("Exists2Snake", "∃2snake", val, true,
            B({{0, 1}, {0, 1}, {0}})
                .compat(Y, 0, X, 1)
                .compat(Y, 1, X, 0)
                .compat(Y, 0, Z, 0)
                .incompat(Y, 0, X, 0)
                .incompat(Z, 0, Y, 1)
                .at(X, {0, 1}, 1)
                .build());

        // Patterns that do not allow variable elimination.
        add("PivotSym", "Pivot(sym)", non, true, B({{0}, {0}, {0}}).incompat(Z, 0, X, 0).incompat(Y, 0, X, 0).at(X).build());
        add("PivotAsym", "Pivot(asym)", non, true, B({{0}, {0}, {0}}).incompat(Z, 0, Y, 0).incompat(Y, 0, X, 0).at(X).build());
        add("Cycle3", "Cycle(3)", non, true,
            B({{0, 1}, {0, 1}, {0, 1}}).incompat(Y, 1, X, 1).incompat(Y, 0, Z, 1).incompat(X, 0, Z, 0).build());
        add("KiteSym", "Kite(sym)", non, true,
            B({{0}, {0, 1}, {0, 1}})
                .compat(Y, 0, X, 0)
                .compat(Y, 0, Z, 1)
                .compat(Y, 1, Z, 0)
                .compat(Z, 0, X, 0)
                .incompat(Y, 1, Z, 1)
                .at(X)
                .build());
        add("KiteAsym", "Kite(asym)", non, true,
            B({{0, 1}, {0, 1}, {0}})
                .compat(Y, 0, X, 1)
                .compat(Y, 0, Z, 0)
                .compat(Y, 1, X, 0)
                .compat(Z, 0, X, 0)
                .incompat(Y, 1, X, 1)
                .at(X)
                .build());
        add("RotSubBTP", "rotsubBTP", non, true,
            B({{0}, {0, 1}, {0}}).compat(Y, 1, Z, 0).incompat(Z, 0, Y, 0).incompat(Y, 1, X, 0).compat(Z, 0, X, 0).at(X).build());
        add("VPlusMinus", "V(+-)", non, true, B({{0, 1}, {0}}).compat(Y, 0, X, 0).incompat(Y, 0, X, 1).at(X, {0}).build());
        add("TriangleAsym", "Triangle(asym)", non, true,
            B({{0}, {0}, {0}}).incompat(Y, 0, X, 0).compat(Y, 0, Z, 0).compat(Z, 0, X, 0).at(X, {0}).build());
        add("Triangle", "Triangle", non, true, B({{0}, {0}, {0}}).compat(X, 0, Y, 0).compat(Y, 0, Z, 0).compat(Z, 0, X, 0).build());
        // Diamond: the middle variable (1) carries two values.
        add("Diamond", "Diamond", non, true, B({{0}, {0, 1}, {0}}).compat(1, 0, 2, 0).compat(1, 1, 2, 0).compat(1, 0, 0, 0).incompat(1, 1, 0, 0).build());
        add("Z", "Z", non, true, B({{0, 1}, {0, 1}}).incompat(0, 1, 1, 0).compat(0, 1, 1, 1).compat(0, 0, 1, 1).compat(0, 0, 1, 0).build());
        add("XL", "XL", non, true,
            B({{0, 1}, {0, 1}, {0}})
                .incompat(0, 1, 1, 1)
                .incompat(2, 0, 0, 0)
                .compat(0, 1, 1, 0)
                .compat(0, 0, 1, 1)
                .compat(2, 0, 1, 0)
                .build());

        // Patterns that do not allow value elimination; b = value 0 of x.
        add("IMinus", "I(-)", non, true, B({{0}, {0}}).incompat(Y, 0, X, 0).at(X, {0}, 0).build());
        add("LMinus", "L(-)", non, true, B({{0, 1}, {0}, {0}}).incompat(Y, 0, X, 1).incompat(Z, 0, X, 0).at(X).build());
        add("LPlusMinus", "L(+-)", non, true, B({{0}, {0}, {0}}).compat(Y, 0, X, 0).incompat(Y, 0, Z, 0).at(X, {0}, 0).build());
        add("Triangle1", "triangle1", non, true,
            B({{0, 1}, {0}, {0}}).compat(Y, 0, X, 0).incompat(Y, 0, X, 1).compat(Y, 0, Z, 0).compat(Z, 0, X, 1).at(X, {0}, 0).build());
        add("Triangle2", "triangle2", non, true,
            B({{0, 1}, {0, 1}, {0}})
                .compat(Y, 1, X, 1)
                .compat(Y, 0, X, 0)
                .incompat(Y, 0, X, 1)
                .compat(Y, 1, Z, 0)
                .compat(Z, 0, X, 1)
                .at(X, {0}, 0)
                .build());
        add("ExistsKite", "∃Kite", non, true,
            B({{0}, {0, 1}, {0, 1}})
                .compat(Y, 0, X, 0)
                .incompat(Y, 1, Z, 1)
                .compat(Y, 1, Z, 0)
                .compat(Y, 0, Z, 1)
                .compat(Z, 0, X, 0)
                .at(X, {0}, 0)
                .build());
        add("ExistsKiteAsym", "∃Kite(asym)", non, true,
            B({{0, 1}, {0, 1}, {0}})
                .compat(Y, 0, X, 1)
                .incompat(Y, 1, X, 1)
                .compat(Y, 1, X, 0)
                .compat(Y, 0, Z, 0)
                .compat(Z, 0, X, 0)
                .at(X, {0}, 0)
                .build());
        add("ExistsKite1", "∃Kite1", non, true,
            B({{0, 1}, {0, 1}, {0, 1}})
                .compat(Y, 0, X, 0)
                .compat(Y, 0, Z, 1)
                .incompat(Y, 0, X, 1)
                .incompat(Y, 1, Z, 1)
                .compat(Y, 1, Z, 0)
                .compat(Z, 0, X, 1)
                .at(X, {0}, 0)
                .build());
        return c;
    }

} // namespace detail

inline auto catalog() -> const std::vector<CatalogEntry> &
{
    static const std::vector<CatalogEntry> entries = detail::build_catalog();
    return entries;
}

inline auto find_pattern(std::string_view name) -> const CatalogEntry *
{
    for (const auto & entry : catalog())
        if (entry.name == name || entry.display == name)
            return &entry;
    return nullptr;
}

/// Looks a pattern up by ASCII name or display spelling.
inline auto get_pattern(std::string_view name) -> const CatalogEntry &
{
    if (auto entry = find_pattern(name))
        return *entry;
    throw InputError("unknown pattern '" + std::string(name) + "'");
}

inline auto list_catalog() -> CatalogListing
{
    CatalogListing listing;
    for (const auto & entry : catalog()) {
        if (! entry.principal)
            listing.auxiliary.push_back(entry.name);
        else if (entry.kind == PatternKind::var_elim)
            listing.var_elim.push_back(entry.name);
        else if (entry.kind == PatternKind::val_elim)
            listing.val_elim.push_back(entry.name);
        else
            listing.non_elim.push_back(entry.name);
    }
    return listing;
}

} // namespace cspprune
