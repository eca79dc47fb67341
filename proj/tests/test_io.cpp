#include "support.hpp"

#include <gtest/gtest.h>

using namespace cspprune;

namespace {

auto error_at(std::string_view text) -> std::pair<std::size_t, std::size_t>
{
    try {
        parse_instance(text);
    }
    catch (const InputError & e) {
        return {e.line(), e.column()};
    }
    return {0, 0};
}

} // namespace

TEST(ParseInstance, MinimalEquality)
{
    auto inst = parse_instance("bcsp 1\nvars 2\ndom 0 : 0\ndom 1 : 0\ncon 0 1\n0 0\nend\n");
    EXPECT_EQ(inst, fixture("I2").instance);
}

TEST(ParseInstance, CommentsAndMissingPairs)
{
    auto inst = parse_instance("# header\nbcsp 1\nvars 3   # three\ndom 0 : 0 1\ndom 1 : 0 1\ndom 2 : 1\ncon 1 0\n1 0\nend\n");
    EXPECT_TRUE(inst.compatible({0, 0}, {1, 1}));
    EXPECT_FALSE(inst.compatible({0, 0}, {1, 0}));
    EXPECT_TRUE(inst.compatible({0, 0}, {2, 1}));
    EXPECT_EQ(inst.domain(2), std::vector<Value>{1});
}

TEST(ParseInstance, ErrorLocations)
{
    EXPECT_EQ(error_at("bcsp 2\n"), (std::pair<std::size_t, std::size_t>{1, 6}));
    EXPECT_EQ(error_at("bcsp 1\nvars 2\ndom 0 0\ndom 1 : 0\n").first, 3u);
    EXPECT_EQ(error_at("bcsp 1\nvars 2\ndom 0 : x\ndom 1 : 0\n"), (std::pair<std::size_t, std::size_t>{3, 9}));
    EXPECT_EQ(error_at("bcsp 1\nvars 2\ndom 0 : 0\ndom 1 : 0\ncon 0 1\n0 3\nend\n").first, 6u);
    EXPECT_EQ(error_at("bcsp 1\nvars 2\ndom 0 : 0\ndom 1 : 0\ncon 0 1\n0 0\n").first, 5u);
    EXPECT_EQ(error_at("bcsp 1\nvars 2\ndom 0 : 0\ndom 1 : 0\ncon 0 1\nend\ncon 1 0\nend\n").first, 7u);
    EXPECT_EQ(error_at("bcsp 1\nvars 2\ndom 0 : 0\n").first, 4u);
    EXPECT_NE(error_at("").first, 0u);
}

TEST(SerializeInstance, CanonicalAndDeterministic)
{
    auto a = parse_instance("bcsp 1\nvars 2\ndom 1 : 1 0\ndom 0 : 0 1\ncon 1 0\n1 1\n0 1\nend\n");
    auto text = serialize_instance(a);
    EXPECT_EQ(text, "bcsp 1\nvars 2\ndom 0 : 0 1\ndom 1 : 0 1\ncon 0 1\n1 0\n1 1\nend\n");
    EXPECT_EQ(serialize_instance(parse_instance(text)), text);
}

TEST(SerializeInstance, OmitsRemovedValues)
{
    auto inst = fixture("K3_2COL").instance;
    inst.remove_value(0, 1);
    auto text = serialize_instance(inst);
    EXPECT_NE(text.find("dom 0 : 0\n"), std::string::npos);
    EXPECT_EQ(parse_instance(text), inst);
    inst.deactivate(1);
    EXPECT_THROW(serialize_instance(inst), ContractViolation);
}

TEST(SerializeInstance, RandomRoundTrip)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = random_instance(6, 4, 0.6, 0.4, seed);
        EXPECT_EQ(parse_instance(serialize_instance(inst)), inst);
    }
}

TEST(Fingerprint, DistinguishesInstances)
{
    EXPECT_EQ(fingerprint(fixture("K4_COLOUR").instance), fingerprint(fixture("K4_COLOUR").instance));
    EXPECT_NE(fingerprint(fixture("K4_COLOUR").instance), fingerprint(fixture("K3_2COL").instance));
}

TEST(Pattern, RoundTripBTP)
{
    const auto & btp = get_pattern("BTP").pattern;
    EXPECT_EQ(parse_pattern(serialize_pattern(btp)), btp);
}

TEST(Pattern, PartialEdges)
{
    auto p = parse_pattern("pattern 1\nvars 2\ndom 0 : 0 1\ndom 1 : 0\nedge - 1 0 0 1\nevar 0\neval 0 0\neval 0 1\ndval 0 1\n");
    EXPECT_EQ(p.cpt({0, 1}, {1, 0}), std::optional<bool>(false));
    EXPECT_FALSE(p.cpt({0, 0}, {1, 0}).has_value());
    EXPECT_EQ(p.distinguished_val(), std::optional<Value>(1));
    EXPECT_TRUE(equivalent(p, get_pattern("NS").pattern) == false);
}

TEST(Pattern, SemanticErrors)
{
    EXPECT_THROW(parse_pattern("pattern 1\nvars 2\ndom 0 : 0\ndom 1 : 0\nevar 0\neval 1 0\n"), InputError);
    EXPECT_THROW(parse_pattern("pattern 1\nvars 2\ndom 0 : 0\ndom 1 : 0\neval 0 0\n"), InputError);
    EXPECT_THROW(parse_pattern("pattern 1\nvars 2\ndom 0 : 0 1\ndom 1 : 0\nevar 0\neval 0 0\ndval 0 1\n"), InputError);
    EXPECT_THROW(parse_pattern("pattern 1\nvars 2\ndom 0 : 0\ndom 1 : 0\nedge + 0 0 0 0\n"), InputError);
    EXPECT_THROW(parse_pattern("pattern 1\nvars 2\ndom 0 : 0\ndom 1 : 0\nedge * 0 0 1 0\n"), InputError);
}

TEST(Trace, RoundTrip)
{
    auto inst = fixture("NONCONF").instance;
    for (auto var_elim : {true, false}) {
        EngineConfig cfg;
        cfg.var_elim = var_elim;
        auto trace = preprocess(inst, cfg).trace;
        auto parsed = parse_trace(serialize_trace(trace));
        EXPECT_EQ(parsed.fingerprint, trace.fingerprint);
        ASSERT_EQ(parsed.records.size(), trace.records.size());
        for (std::size_t i = 0; i < trace.records.size(); ++i) {
            auto expected = trace.records[i];
            expected.domain.clear();
            EXPECT_EQ(parsed.records[i], expected);
        }
        EXPECT_EQ(serialize_trace(parsed), serialize_trace(trace));
    }
}

TEST(Trace, ParseErrors)
{
    EXPECT_THROW(parse_trace("bcsp-trace 2 0\n"), InputError);
    EXPECT_THROW(parse_trace("bcsp-trace 1 0\nvar 0 rule=Nope m=\n"), InputError);
    EXPECT_THROW(parse_trace("bcsp-trace 1 0\nval 0 rule=NS m=0:1,1:0\n"), InputError);
}
