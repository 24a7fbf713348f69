#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dense_oracle.hpp"
#include "dfrc/qcqp1.hpp"
#include "grid_oracle.hpp"
#include "helpers.hpp"
#include "penalty_oracle.hpp"

using namespace dfrc;
using testing_util::random_vector;

namespace {

// Multiplier, slack and feasibility conditions at tolerance 1e-8.
void expect_kkt(const QuadraticConstraint& c, const CVector& v_bar, const ProjectionResult& r) {
  const double scale = c.scale();
  EXPECT_LE(r.kkt_residual, 1e-8 * (1.0 + v_bar.norm()));
  EXPECT_GE(r.multiplier, 0.0);
  EXPECT_LE(c.quadratic(r.point) - c.bound(), 1e-8 * scale);
  if (std::isfinite(r.multiplier)) EXPECT_LE(r.multiplier * std::abs(c.quadratic(r.point) - c.bound()), 1e-8 * scale);
}

}  // namespace

TEST(Project, FeasiblePointUnchanged) {
  const CVector a = steering_vector({4, 0.5}, 10.0);
  const auto c = build_stopband_constraint(a, 100.0, 2);
  std::mt19937_64 rng(1);
  const CVector v = random_vector(rng, 8, 0.1);
  const auto r = project(c, v);
  EXPECT_EQ(r.point, v);
  EXPECT_FALSE(r.active);
  EXPECT_EQ(r.multiplier, 0.0);
}

TEST(Project, AntennaPowerRadial) {
  const auto c = build_power_constraint(1, 1.0, 2, 3);
  CVector v = CVector::Zero(6);
  v << 7.0, 3.0, -2.0, 5.0, 4.0, 1.0;
  const auto r = project(c, v);
  EXPECT_NEAR(r.point[1].real(), 0.6, 1e-15);
  EXPECT_NEAR(r.point[4].real(), 0.8, 1e-15);
  for (Index i : {0, 2, 3, 5}) EXPECT_EQ(r.point[i], v[i]);
  expect_kkt(c, v, r);
}

TEST(Project, AntennaPowerClosedFormEdges) {
  EXPECT_EQ(project_antenna_power(CVector::Zero(3), 2.0), CVector::Zero(3));
  const CVector g = (CVector(2) << 1.0, 1.0).finished();
  EXPECT_EQ(project_antenna_power(g, 2.0), g);
}

TEST(Project, StopbandSingleUserScalar) {
  const CVector a = steering_vector({4, 0.5}, 25.0);
  const StackShape s{1, 4};
  std::mt19937_64 rng(2);
  CVector r_perp = random_vector(rng, 4);
  r_perp -= (a.dot(r_perp) / a.squaredNorm()) * a;
  const CVector v = 3.0 * a / a.norm() + r_perp;
  const auto out = project_stopband(s, v, a, 0.5);
  const Complex beta = a.dot(out.point) / a.norm();
  EXPECT_NEAR(beta.real(), std::sqrt(0.5) / a.norm(), 1e-14);
  EXPECT_NEAR(beta.imag(), 0.0, 1e-14);
  CVector residual = out.point - beta * a / a.norm();
  EXPECT_LE((residual - r_perp).norm(), 1e-13 * (1.0 + r_perp.norm()));
}

TEST(Project, PassbandDegenerateInjection) {
  // ||a|| = 2, eps = 4, all coefficients zero -> block 0 gains a * 0.5, cost 1.
  CVector a(4);
  a << 1.0, 1.0, 1.0, 1.0;
  const StackShape s{2, 4};
  CVector v = CVector::Zero(8);
  v.segment(4, 4) << 1.0, -1.0, 1.0, -1.0;
  const auto r = project_passband(s, v, a, 4.0);
  EXPECT_LE((r.point.head(4) - 0.5 * a).norm(), 1e-15);
  EXPECT_EQ(r.point.segment(4, 4), v.segment(4, 4));
  EXPECT_NEAR((r.point - v).squaredNorm(), 1.0, 1e-15);
}

TEST(Project, SinrPureAmplification) {
  const CVector h = (CVector(1) << 1.0).finished();
  const StackShape s{1, 1};
  const CVector v = (CVector(1) << 1.0).finished();
  const auto r = project_sinr(s, v, h, 4.0, 1.0, 0);
  EXPECT_NEAR(std::abs(r.point[0] - Complex{2.0, 0.0}), 0.0, 1e-12);
}

TEST(Project, GenericUnitBall) {
  const CMatrix f = CMatrix::Identity(3, 3);
  const CVector v = (CVector(3) << 2.0, 0.0, 0.0).finished();
  const auto r = project_generic(f, 1.0, v);
  EXPECT_LE((r.point - v / 2.0).norm(), 1e-12);
}

TEST(Project, GenericHardCaseMatchesGrid) {
  CMatrix f = CMatrix::Zero(2, 2);
  f(0, 0) = -1.0;
  f(1, 1) = 1.0;
  const CVector v = (CVector(2) << 0.0, 1.0).finished();
  const auto r = project_generic(f, -4.0, v);
  const auto grid = oracle::grid_projection_2d(-1.0, 0.0, 1.0, -4.0, 0.0, 1.0);
  EXPECT_NEAR(grid.cost, 4.5, 1e-6);
  EXPECT_NEAR((r.point - v).squaredNorm(), grid.cost, 1e-6);
  EXPECT_NEAR(std::abs(r.point[0]), std::sqrt(4.25), 1e-10);
  EXPECT_NEAR(r.point[1].real(), 0.5, 1e-12);
  EXPECT_NEAR(r.multiplier, 1.0, 1e-12);
}

TEST(Project, GenericAgreesWithStructuredPaths) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const int n = testing_util::uniform_int(rng, 2, 4);
    const int m = 2;
    const CVector a = steering_vector({n, 0.5}, testing_util::uniform(rng, -80.0, 80.0));
    const CVector h = random_vector(rng, n);
    const CVector v = random_vector(rng, m * n);
    const double gamma = testing_util::uniform(rng, 1.0, 10.0);
    const std::pair<QuadraticConstraint, oracle::Dense> cases[] = {
        {build_passband_constraint(a, 30.0, m), oracle::passband(a, 30.0, m)},
        {build_stopband_constraint(a, 0.1, m), oracle::stopband(a, 0.1, m)},
        {build_power_constraint(0, 0.05, m, n), oracle::power(0, 0.05, m, n)},
        {build_sinr_constraint(h, gamma, 5.0, 0, m), oracle::sinr(h, gamma, 5.0, 0, m)},
    };
    for (const auto& [c, d] : cases) {
      const auto fast = project(c, v);
      const auto slow = project_generic(d.f_matrix, d.f, v);
      EXPECT_NEAR((fast.point - v).squaredNorm(), (slow.point - v).squaredNorm(),
                  1e-8 * (1.0 + (slow.point - v).squaredNorm()))
          << kind_name(c.kind());
    }
  }
}

TEST(Project, OrthogonalComplementPreserved) {
  std::mt19937_64 rng(6);
  const int n = 5;
  const int m = 3;
  const CVector a = steering_vector({n, 0.5}, 12.0);
  for (int t = 0; t < 50; ++t) {
    const CVector v = random_vector(rng, m * n, 2.0);
    for (const auto& c : {build_stopband_constraint(a, 0.05, m), build_passband_constraint(a, 400.0, m),
                          build_sinr_constraint(a, 5.0, 100.0, 1, m)}) {
      const auto r = project(c, v);
      for (int u = 0; u < m; ++u) {
        const CVector before = v.segment(u * n, n) - (a.dot(v.segment(u * n, n)) / a.squaredNorm()) * a;
        const CVector after = r.point.segment(u * n, n) - (a.dot(r.point.segment(u * n, n)) / a.squaredNorm()) * a;
        EXPECT_LE((after - before).norm(), 1e-13 * (1.0 + v.norm()));
      }
    }
  }
}

TEST(Project, SinrHardCaseZeroOwnCoefficient) {
  const int n = 3;
  const int m = 2;
  std::mt19937_64 rng(8);
  const CVector h = random_vector(rng, n);
  CVector v = random_vector(rng, m * n);
  v.head(n) -= (h.dot(v.head(n)) / h.squaredNorm()) * h;  // own coefficient zero
  const auto c = build_sinr_constraint(h, 4.0, 2.0, 0, m);
  const auto r = project(c, v);
  expect_kkt(c, v, r);
  const auto d = oracle::sinr(h, 4.0, 2.0, 0, m);
  const auto best = oracle::penalty_oracle(d.f_matrix, d.f, v);
  EXPECT_LE((r.point - v).squaredNorm(), best.cost + 1e-6);
}

TEST(Project, KktOnRandomInstances) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const int n = testing_util::uniform_int(rng, 2, 4);
    const int m = testing_util::uniform_int(rng, 1, 2);
    const CVector a = steering_vector({n, 0.5}, testing_util::uniform(rng, -80.0, 80.0));
    const CVector h = random_vector(rng, n);
    const CVector v = random_vector(rng, m * n, testing_util::uniform(rng, 0.1, 3.0));
    for (const auto& c : {build_passband_constraint(a, 20.0, m), build_stopband_constraint(a, 0.3, m),
                          build_power_constraint(n - 1, 0.2, m, n), build_sinr_constraint(h, 8.0, 3.0, m - 1, m)}) {
      const auto r = project(c, v);
      expect_kkt(c, v, r);
    }
  }
}

TEST(Project, GenericPsdWithNegativeBoundIsDomainError) {
  EXPECT_THROW(project_generic(CMatrix::Identity(2, 2), -1.0, CVector::Ones(2)), DomainError);
}

TEST(Project, LengthMismatchIsDomainError) {
  const auto c = build_power_constraint(0, 1.0, 2, 3);
  EXPECT_THROW(project(c, CVector::Ones(5)), DomainError);
}

TEST(Project, NoWorseThanPenaltySearch) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    const int n = testing_util::uniform_int(rng, 2, 3);
    const int m = 2;
    const CVector a = steering_vector({n, 0.5}, testing_util::uniform(rng, -80.0, 80.0));
    const CVector h = random_vector(rng, n);
    const CVector v = random_vector(rng, m * n);
    const std::pair<QuadraticConstraint, oracle::Dense> cases[] = {
        {build_passband_constraint(a, 15.0, m), oracle::passband(a, 15.0, m)},
        {build_stopband_constraint(a, 0.2, m), oracle::stopband(a, 0.2, m)},
        {build_power_constraint(1, 0.1, m, n), oracle::power(1, 0.1, m, n)},
        {build_sinr_constraint(h, 6.0, 2.0, 1, m), oracle::sinr(h, 6.0, 2.0, 1, m)},
    };
    for (const auto& [c, d] : cases) {
      const auto ours = project(c, v);
      const auto best = oracle::penalty_oracle(d.f_matrix, d.f, v, 8);
      ASSERT_LE(best.violation, 1e-9 * (1.0 + std::abs(d.f))) << kind_name(c.kind());
      EXPECT_LE((ours.point - v).squaredNorm(), best.cost * (1.0 + 1e-8) + 1e-10) << kind_name(c.kind());
    }
  }
}
