#include "support.hpp"

#include <gtest/gtest.h>

using namespace cspprune;

namespace {

// Removes unsupported values one at a time until nothing changes.
auto naive_ac(Instance inst) -> Instance
{
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto v : inst.active_vars())
            for (auto a : inst.domain(v))
                for (auto w : inst.active_vars()) {
                    if (w == v)
                        continue;
                    bool supported = false;
                    for (auto b : inst.domain(w))
                        supported = supported || inst.compatible({v, a}, {w, b});
                    if (! supported && inst.in_domain(v, a)) {
                        inst.remove_value(v, a);
                        changed = true;
                    }
                }
    }
    return inst;
}

} // namespace

TEST(ArcConsistency, AlreadyConsistent)
{
    auto k4 = fixture("K4_COLOUR").instance;
    auto copy = k4;
    auto r = enforce_ac(copy);
    EXPECT_TRUE(r.removed.empty());
    EXPECT_FALSE(r.wipeout);
    EXPECT_EQ(copy, k4);
    EXPECT_TRUE(is_arc_consistent(k4));
}

TEST(ArcConsistency, Chain)
{
    auto inst = make_instance({{0}, {0, 1}, {0, 1}}, {{0, 1, {{0, 1}}}, {1, 2, {{1, 0}, {0, 1}}}});
    EXPECT_FALSE(is_arc_consistent(inst));
    auto r = enforce_ac(inst);
    EXPECT_FALSE(r.wipeout);
    EXPECT_EQ(inst.domain(1), std::vector<Value>{1});
    EXPECT_EQ(inst.domain(2), std::vector<Value>{0});
    EXPECT_EQ(r.removed.size(), 2u);
}

TEST(ArcConsistency, Wipeout)
{
    auto inst = make_instance({{0}, {0}}, {{0, 1, {}}});
    auto r = enforce_ac(inst);
    ASSERT_TRUE(r.wipeout);
}

TEST(ArcConsistency, IgnoresInactiveVariables)
{
    auto inst = make_instance({{0}, {0, 1}}, {{0, 1, {{0, 1}}}});
    inst.deactivate(0);
    EXPECT_TRUE(is_arc_consistent(inst));
    EXPECT_TRUE(enforce_ac(inst).removed.empty());
}

TEST(ArcConsistency, MatchesNaiveFixpoint)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(seed);
        std::size_t n = 2 + rng() % 5, d = 1 + rng() % 4;
        std::vector<std::vector<Value>> domains(n);
        for (auto & dom : domains)
            for (Value a = 0; a < d; ++a)
                dom.push_back(a);
        std::vector<ConstraintSpec> cons;
        for (VarId i = 0; i < n; ++i)
            for (VarId j = i + 1; j < n; ++j)
                if (rng() % 2) {
                    ConstraintSpec c{i, j, {}};
                    for (Value a = 0; a < d; ++a)
                        for (Value b = 0; b < d; ++b)
                            if (rng() % 3)
                                c.allowed.emplace_back(a, b);
                    cons.push_back(c);
                }
        auto inst = make_instance(domains, cons);
        auto expected = naive_ac(inst);
        bool naive_wipe = false;
        for (VarId v = 0; v < n; ++v)
            naive_wipe = naive_wipe || expected.domain_size(v) == 0;
        auto r = enforce_ac(inst);
        EXPECT_EQ(r.wipeout.has_value(), naive_wipe) << seed;
        if (! naive_wipe) {
            EXPECT_EQ(inst, expected) << seed;
            EXPECT_TRUE(is_arc_consistent(inst));
        }
    }
}

TEST(ArcConsistency, PreservesSolutions)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = random_instance(5, 3, 0.8, 0.3, seed);
        auto before = enumerate_solutions(inst);
        enforce_ac(inst);
        EXPECT_EQ(enumerate_solutions(inst), before);
    }
}
