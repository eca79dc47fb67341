#pragma once

#include <cspprune/model.hpp>

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace cspprune {

struct ACResult
{
    std::vector<Assignment> removed; // in removal order
    std::optional<VarId> wipeout;
};

namespace detail {

    // Removes values of v without support in w; returns whether anything changed.
    inline auto revise(Instance & inst, VarId v, const Arc & arc, ACResult & result) -> bool
    {
        bool changed = false;
        auto others = inst.domain(arc.other);
        for (auto a : inst.domain(v)) {
            bool supported = false;
            for (auto b : others)
                if (inst.compatible(arc, a, b)) {
                    supported = true;
                    break;
                }
            if (! supported) {
                inst.remove_value(v, a);
                result.removed.push_back({v, a});
                changed = true;
            }
        }
        return changed;
    }

} // namespace detail

/// Establishes arc consistency over the active variables. Arcs are revised in
/// ascending (variable, neighbour) order, values ascending.
inline auto enforce_ac(Instance & inst) -> ACResult
{
    ACResult result;
    std::set<std::pair<VarId, VarId>> pending;
    for (auto v : inst.active_vars())
        for (const auto & arc : inst.arcs(v))
            if (inst.is_active(arc.other))
                pending.emplace(v, arc.other);

    while (! pending.empty()) {
        auto [v, w] = *pending.begin();
        pending.erase(pending.begin());
        const Arc * arc = inst.find_arc(v, w);
        if (! detail::revise(inst, v, *arc, result))
            continue;
        if (inst.domain_size(v) == 0) {
            result.wipeout = v;
            return result;
        }
        for (const auto & back : inst.arcs(v))
            if (back.other != w && inst.is_active(back.other))
                pending.emplace(back.other, v);
    }
    return result;
}

inline auto is_arc_consistent(const Instance & inst) -> bool
{
    for (auto v : inst.active_vars()) {
        if (inst.domain_size(v) == 0)
            return false;
        for (const auto & arc : inst.arcs(v)) {
            if (! inst.is_active(arc.other))
                continue;
            auto others = inst.domain(arc.other);
            for (auto a : inst.domain(v)) {
                bool supported = false;
                for (auto b : others)
                    if (inst.compatible(arc, a, b)) {
                        supported = true;
                        break;
                    }
                if (! supported)
                    return false;
            }
        }
    }
    return true;
}

} // namespace cspprune
