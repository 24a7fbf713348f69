#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dfrc/array_model.hpp"

using namespace dfrc;

namespace {

ArrayGeometry ula(Index n, double d = 0.5) { return {n, d}; }

}  // namespace

TEST(SteeringVector, BroadsideIsAllOnes) {
  const auto a = steering_vector(ula(2), 0.0);
  EXPECT_NEAR(std::abs(a[0] - Complex{1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - Complex{1, 0}), 0.0, 1e-15);
}

TEST(SteeringVector, EndfireAlternates) {
  const auto a = steering_vector(ula(2), 90.0);
  EXPECT_NEAR(std::abs(a[1] - Complex{-1, 0}), 0.0, 1e-15);
}

TEST(SteeringVector, ThirtyDegreesQuarterTurns) {
  const auto a = steering_vector(ula(4), 30.0);
  for (Index n = 0; n < 4; ++n) {
    const Complex expected = std::polar(1.0, std::numbers::pi / 2.0 * static_cast<double>(n));
    EXPECT_NEAR(std::abs(a[n] - expected), 0.0, 1e-12) << n;
  }
}

TEST(SteeringVector, UnitModulusAndConjugateSymmetry) {
  for (double t = -90.0; t <= 90.0; t += 7.5) {
    const auto a = steering_vector(ula(7), t);
    const auto b = steering_vector(ula(7), -t);
    EXPECT_EQ(a[0], Complex(1.0, 0.0));
    for (Index n = 0; n < 7; ++n) {
      EXPECT_NEAR(std::abs(a[n]), 1.0, 1e-12);
      EXPECT_NEAR(std::abs(b[n] - std::conj(a[n])), 0.0, 1e-12);
    }
  }
}

TEST(SteeringVector, RejectsAnglesOutsideRange) {
  EXPECT_THROW(steering_vector(ula(3), 90.5), DomainError);
  EXPECT_THROW(steering_vector(ula(3), -91.0), DomainError);
  EXPECT_THROW(steering_vector(ula(3), std::nan("")), DomainError);
}

TEST(LosChannel, BroadsideAndScaling) {
  const auto h = los_channel(ula(3), 0.0);
  for (Index n = 0; n < 3; ++n) EXPECT_NEAR(std::abs(h[n] - Complex{1, 0}), 0.0, 1e-15);
  const Complex gain = std::polar(2.0, std::numbers::pi / 3.0);
  const auto g = los_channel(ula(10), 45.0, gain);
  const auto a = steering_vector(ula(10), 45.0);
  EXPECT_NEAR((g - gain * a).norm(), 0.0, 1e-14);
  EXPECT_NEAR((los_channel(ula(10), 45.0) - a).norm(), 0.0, 0.0);
  EXPECT_THROW(los_channel(ula(3), 0.0, Complex{0, 0}), ConfigError);
}

TEST(RayleighChannel, DeterministicAndUnitVariance) {
  const auto geo = ula(8);
  EXPECT_EQ(rayleigh_channel(geo, 5), rayleigh_channel(geo, 5));
  EXPECT_NE(rayleigh_channel(geo, 5), rayleigh_channel(geo, 6));
  double power = 0.0;
  const int draws = 100000;
  ArrayGeometry one{2, 0.5};
  for (int s = 0; s < draws / 2; ++s) power += rayleigh_channel(one, static_cast<std::uint64_t>(s)).squaredNorm();
  EXPECT_NEAR(power / draws, 1.0, 0.02);
}

TEST(UnitConversions, Definitions) {
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  EXPECT_EQ(dbm_to_watts(40.0), 10.0);
  EXPECT_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_DOUBLE_EQ(dbm_to_watts(0.0), 0.001);
  EXPECT_NEAR(linear_to_db(100.0), 20.0, 1e-14);
}

TEST(Grids, PaperRegionsGiveThirtyEightConstraints) {
  const auto g = build_grids({{-5, 5}}, {{-90, -60}, {-30, -20}, {20, 30}, {60, 90}}, 2.0, 5.0);
  EXPECT_EQ(g.mainlobe, (std::vector<double>{-5, -3, -1, 1, 3, 5}));
  ASSERT_EQ(g.stopband.size(), 20u);
  EXPECT_EQ(g.stopband.front(), -90.0);
  EXPECT_EQ(g.stopband.back(), 90.0);
  EXPECT_EQ(g.mainlobe.size() + g.stopband.size() + 10 + 2, 38u);
  for (std::size_t i = 1; i < g.stopband.size(); ++i) EXPECT_LT(g.stopband[i - 1], g.stopband[i]);
}

TEST(Grids, SinglePointRegion) {
  const auto g = build_grids({{0, 0}}, {{30, 40}}, 3.0, 5.0);
  EXPECT_EQ(g.mainlobe, std::vector<double>{0.0});
}

TEST(Grids, ErrorsAreConfigurationErrors) {
  EXPECT_THROW(build_grids({}, {{30, 40}}, 2.0, 5.0), ConfigError);
  EXPECT_THROW(build_grids({{0, 0}}, {}, 2.0, 5.0), ConfigError);
  EXPECT_THROW(build_grids({{-10, 10}}, {{5, 40}}, 2.0, 5.0), ConfigError);
  EXPECT_THROW(build_grids({{0, 0}}, {{30, 40}, {35, 50}}, 2.0, 5.0), ConfigError);
  EXPECT_THROW(build_grids({{0, 0}}, {{30, 40}}, 0.0, 5.0), ConfigError);
  EXPECT_THROW(build_grids({{0, 0}}, {{30, 95}}, 2.0, 5.0), ConfigError);
}

TEST(Geometry, Validation) {
  EXPECT_THROW(ula(1).validate(), ConfigError);
  EXPECT_THROW(ula(4, 0.0).validate(), ConfigError);
  EXPECT_NO_THROW(ula(2).validate());
}
