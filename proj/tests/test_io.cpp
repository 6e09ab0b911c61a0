#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "wlns/io.hpp"

using namespace wlns;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto d = std::filesystem::temp_directory_path() / ("wlns-io-" + name);
    std::filesystem::remove_all(d);
    return d;
}

bool same_bits(const spectral::Spectrum& a, const spectral::Spectrum& b) {
    return a.c.size() == b.c.size() && std::memcmp(a.c.data(), b.c.data(), a.c.size() * sizeof(a.c[0])) == 0;
}

solver2d::RunConfig small_random() {
    solver2d::RunConfig c;
    c.n = 32;
    c.L = 10.0;
    c.dt = 1e-3;
    c.epsilon = 0.5;
    c.init.kind = solver2d::InitKind::random_divfree;
    c.init.amplitude = 2.0;
    c.seed = 11;
    return c;
}

}  // namespace

TEST(Csv, LedgerRoundTripIsExact) {
    auto cfg = small_random();
    cfg.t_end = 0.05;
    cfg.weight = weights::WeightSpec::radial(1.0, 2);
    solver2d::Ledger ledger;
    solver2d::run(cfg, ledger);
    const auto t = io::parse_csv(io::to_csv(ledger));
    ASSERT_EQ(t.rows.size(), ledger.rows.size());
    const auto e = t.column("e_phi_u");
    for (std::size_t k = 0; k < e.size(); ++k) EXPECT_EQ(e[k], ledger.rows[k].e_phi_u);
    EXPECT_EQ(t.column("t").back(), ledger.rows.back().t);
    EXPECT_THROW(t.column("nope"), IoError);
}

TEST(Csv, ErrorsNameTheLine) {
    try {
        io::parse_csv("t,a\n0,1\n1,x\n", "f.csv");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(io::parse_csv("t,a\n0,1,2\n"), IoError);
    EXPECT_THROW(io::parse_csv(""), IoError);
}

TEST(Checkpoint, TwoDimensionalRestartIsBitwiseIdentical) {
    const auto cfg = small_random();
    const solver2d::Stepper stepper(cfg.grid(), cfg.dt, cfg.epsilon, cfg.shape);
    auto s = solver2d::initial_state(cfg);
    for (int k = 0; k < 20; ++k) s = stepper.step(s);
    const auto dir = scratch("2d");
    io::save(dir / "mid.bin", s);
    auto straight = s;
    for (int k = 0; k < 20; ++k) straight = stepper.step(straight);
    auto restarted = io::load_2d(dir / "mid.bin");
    EXPECT_EQ(restarted.t, s.t);
    EXPECT_EQ(restarted.epsilon, s.epsilon);
    for (int k = 0; k < 20; ++k) restarted = stepper.step(restarted);
    EXPECT_TRUE(same_bits(straight.u[0], restarted.u[0]));
    EXPECT_TRUE(same_bits(straight.u[1], restarted.u[1]));
    std::filesystem::remove_all(dir);
}

TEST(Checkpoint, TwoDimensionalHeaderLayout) {
    const auto s = solver2d::initial_state(small_random());
    const auto bytes = io::encode(s);
    EXPECT_EQ(bytes.substr(0, 4), "WL2D");
    std::uint32_t n;
    double L;
    std::memcpy(&n, bytes.data() + 4, 4);
    std::memcpy(&L, bytes.data() + 8, 8);
    EXPECT_EQ(n, 32u);
    EXPECT_EQ(L, 10.0);
    EXPECT_EQ(bytes.size(), 32u + 4u + 2u * 32u * 17u * 16u);
}

TEST(Checkpoint, AxisymmetricRestartIsBitwiseIdentical) {
    const axisym::CylGrid g{32, 32, 8.0, 8.0};
    auto s = axisym::vortex_ring(g, {2.0, 0.0, 0.5, 10.0});
    for (int k = 0; k < 10; ++k) s = axisym::step_axi(s, 2e-3);
    const auto bytes = io::encode(s);
    EXPECT_EQ(bytes.size(), 36u + 32u * 32u * 8u);
    auto straight = s, restarted = io::decode_axi(bytes);
    for (int k = 0; k < 10; ++k) {
        straight = axisym::step_axi(straight, 2e-3);
        restarted = axisym::step_axi(restarted, 2e-3);
    }
    EXPECT_EQ(std::memcmp(straight.eta.v.data(), restarted.eta.v.data(), straight.eta.v.size() * 8), 0);
    EXPECT_EQ(straight.t, restarted.t);
}

TEST(Checkpoint, CorruptInputRejected) {
    const auto bytes = io::encode(solver2d::initial_state(small_random()));
    EXPECT_THROW(io::decode_2d(bytes.substr(0, bytes.size() - 1)), IoError);
    EXPECT_THROW(io::decode_2d(bytes + "x"), IoError);
    EXPECT_THROW(io::decode_axi(bytes), IoError);
    auto bad = bytes;
    bad[4] = 3;  // n = 3 is odd
    EXPECT_THROW(io::decode_2d(bad), IoError);
    EXPECT_THROW(io::load_2d("/nonexistent/wlns.bin"), IoError);
}
