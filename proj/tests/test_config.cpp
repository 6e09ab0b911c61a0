#include <gtest/gtest.h>

#include "wlns/config.hpp"

using namespace wlns;
using namespace wlns::config;

TEST(Config, EmptyTextGivesDefaults) {
    const auto c = parse_config("");
    const solver2d::RunConfig d;
    EXPECT_EQ(c.n, d.n);
    EXPECT_EQ(c.dt, d.dt);
    EXPECT_EQ(c.seed, d.seed);
    EXPECT_EQ(canonical(c, schema_2d()), canonical(d, schema_2d()));
}

TEST(Config, OverridesCommentsAndBlankLines) {
    const auto c = parse_config("# run\n\n n = 128 \nepsilon=0.25  # width\nweight=radial\nweight_gamma=1.5\nweight_form=sq\n"
                                "init=random_divfree\nseed=42\nshape=gaussian_surrogate\n");
    EXPECT_EQ(c.n, 128);
    EXPECT_EQ(c.epsilon, 0.25);
    EXPECT_EQ(c.weight.family, weights::Family::radial_power);
    EXPECT_EQ(c.weight.gamma, 1.5);
    EXPECT_EQ(c.weight.form, weights::Form::one_plus_sq_half);
    EXPECT_EQ(c.init.kind, solver2d::InitKind::random_divfree);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.shape, spectral::Shape::gaussian_surrogate);
}

TEST(Config, BadValueReportsKeyAndLine) {
    try {
        parse_config("dt=frog\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key, "dt");
        EXPECT_EQ(e.line, 1);
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
    try {
        parse_config("n=64\n\nn_steps=3\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key, "n_steps");
        EXPECT_EQ(e.line, 3);
    }
}

TEST(Config, MalformedLinesRejected) {
    EXPECT_THROW(parse_config("n 64\n"), ConfigError);
    EXPECT_THROW(parse_config("=3\n"), ConfigError);
    EXPECT_THROW(parse_config("n=64\nn=32\n"), ConfigError);
    EXPECT_THROW(parse_config("n=6.5\n"), ConfigError);
    EXPECT_THROW(parse_config("dt=inf\n"), ConfigError);
    EXPECT_THROW(parse_config("seed=-1\n"), ConfigError);
    EXPECT_THROW(parse_axi_config("ring.mirrored=maybe\n"), ConfigError);
}

TEST(Config, CanonicalRoundTripIsStable) {
    const auto c = parse_config("dt=0.1\nL=20\ninit.amplitude=3.3333333333333335\nweight=radial\nweight_gamma=1\n");
    const auto text = canonical(c, schema_2d());
    const auto again = parse_config(text);
    EXPECT_EQ(canonical(again, schema_2d()), text);
    EXPECT_EQ(again.init.amplitude, c.init.amplitude);
    EXPECT_EQ(fnv1a(text), fnv1a(canonical(again, schema_2d())));
    EXPECT_NE(fnv1a(text), fnv1a(canonical(parse_config("dt=0.2\n"), schema_2d())));
    // key order in the input does not change the hash
    EXPECT_EQ(fnv1a(canonical(parse_config("n=32\ndt=0.01\n"), schema_2d())),
              fnv1a(canonical(parse_config("dt=0.01\nn=32\n"), schema_2d())));
}

TEST(Config, AxisymmetricRoundTrip) {
    const auto c = parse_axi_config("grid.n_r=64\ngrid.R=6\nring.mirrored=true\nring.z0=1\npsi.form=sq\n");
    EXPECT_EQ(c.grid.n_r, 64);
    EXPECT_EQ(c.grid.R, 6.0);
    EXPECT_TRUE(c.ring.mirrored);
    const auto text = canonical(c, schema_axi());
    EXPECT_EQ(canonical(parse_axi_config(text), schema_axi()), text);
}

TEST(Config, DescribeListsEveryKey) {
    const auto d = describe(schema_2d());
    for (const auto& k : schema_2d()) EXPECT_NE(d.find(k.name + " = "), std::string::npos) << k.name;
}

TEST(Config, HashKnownValues) {
    // FNV-1a 64-bit reference values
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
}
