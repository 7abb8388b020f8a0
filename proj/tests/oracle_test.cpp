#include <gtest/gtest.h>

#include "rpolar/oracle.hpp"
#include "rpolar/relaxed_polar.hpp"
#include "test_support.hpp"

namespace rpolar {
namespace {

Rotation near_identity(int n, std::mt19937_64& g, double size) {
  return exp_skew(testing::random_skew(n, g, size));
}

TEST(Gradient, VanishesAtIdentityForDiagonalD) {
  EXPECT_LE(riemannian_gradient(Rotation::identity(2), DiagParams({3, 1})).norm(), 0.0);
  const Mat a = riemannian_gradient(Rotation(testing::planar(0.3)), DiagParams({3, 1}));
  EXPECT_LE((a + a.transpose()).norm(), 1e-15);
  EXPECT_GT(a.norm(), 1e-3);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 g(41);
  Rng rng(41);
  const double h = 1e-5;
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const DiagParams d(testing::random_strict_diag(n, g));
      const Rotation r = random_rotation(n, rng);
      const Mat a = riemannian_gradient(r, d);
      for (int dir = 0; dir < 20; ++dir) {
        const Mat b = testing::random_skew(n, g);
        const Mat plus = r.matrix() * exp_skew(b, h).matrix();
        const Mat minus = r.matrix() * exp_skew(b, -h).matrix();
        const double fd = (testing::naive_energy(plus, d.values()) - testing::naive_energy(minus, d.values())) / (2 * h);
        const double analytic = 2.0 * frob_inner(a, b);
        EXPECT_LE(std::abs(fd - analytic), 1e-6 * std::max(1.0, std::abs(analytic)))
            << "n=" << n << " trial=" << trial;
      }
    }
  }
}

TEST(Descend, StaysAtMinimizer) {
  const DiagParams d({4, 2, 1});
  const auto set = rpolar_diag(d);
  const auto res = descend(set.rotations[0], d);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.rotation.matrix(), set.rotations[0].matrix());
}

TEST(Descend, TwoDimensionalMinimum) {
  const DiagParams d({3, 1});
  Rng rng(42);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 100; ++s) {
    const auto res = descend(random_rotation(2, rng), d);
    EXPECT_TRUE(res.converged);
    EXPECT_GE(res.value, 2.0 - 1e-8);
    EXPECT_LE(orthogonality_defect(res.rotation.matrix()), 1e-10);
    best = std::min(best, res.value);
  }
  EXPECT_NEAR(best, 2.0, 1e-8);
}

TEST(BruteForce, Examples) {
  EXPECT_NEAR(brute_force_min(DiagParams({4, 2, 1}), 200, 1).best_value, 2.0, 1e-8);
  EXPECT_NEAR(brute_force_min(DiagParams({4, 2, 1, 0.5, 0.25}), 500, 2).best_value, 45.0 / 16.0, 1e-8);
  EXPECT_NEAR(brute_force_min(DiagParams({1, 1, 1}), 50, 3).best_value, 0.0, 1e-12);
  EXPECT_NEAR(brute_force_min(DiagParams({3, 2, 0.5}), 200, 4).best_value, 0.75, 1e-8);
}

TEST(BruteForce, ReportInvariants) {
  const DiagParams d({3.5, 1.2, 0.4, 0.2});
  const auto rep = brute_force_min(d, 64, 5);
  EXPECT_EQ(rep.n_starts, 64);
  EXPECT_EQ(rep.limits.size(), 64U);
  EXPECT_EQ(rep.seed, 5U);
  EXPECT_NEAR(rep.best_value, energy(rep.best_rotation, d), 1e-12);
  EXPECT_LE(orthogonality_defect(rep.best_rotation.matrix()), 1e-10);
  int converged = 0;
  for (const auto& lim : rep.limits) {
    EXPECT_GE(lim.value, rep.best_value);
    converged += lim.converged ? 1 : 0;
  }
  EXPECT_EQ(converged, rep.n_converged);
}

TEST(BruteForce, Deterministic) {
  const DiagParams d({2.5, 1.7, 0.3});
  const auto a = brute_force_min(d, 30, 99);
  const auto b = brute_force_min(d, 30, 99);
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.best_rotation.matrix(), b.best_rotation.matrix());
  for (int i = 0; i < 30; ++i) {
    Rng x = start_rng(99, i), y = start_rng(99, i);
    EXPECT_EQ(x(), y());
  }
  EXPECT_NE(start_rng(99, 0)(), start_rng(99, 1)());
}

TEST(BruteForce, Errors) {
  try {
    brute_force_min(DiagParams(std::vector<double>(9, 1.5)), 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
  EXPECT_THROW(brute_force_min(DiagParams({2, 1}), 0, 1), Error);
}

TEST(BruteForce, AgreesWithClosedForm) {
  std::mt19937_64 g(43);
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const DiagParams d(testing::random_strict_diag(n, g));
      const auto rep = brute_force_min(d, 200, 1000 * static_cast<unsigned>(n) + static_cast<unsigned>(trial));
      EXPECT_NEAR(rep.best_value, reduced_energy(d), 1e-7) << "n=" << n << " trial=" << trial;
    }
  }
}

TEST(Flow, ConstantFromCriticalPoint) {
  const DiagParams d({4, 2, 1});
  FlowOptions opts;
  opts.t_end = 1.0;
  const auto traj = integrate_flow(Rotation::identity(3), d, opts);
  for (const auto& s : traj.states) EXPECT_LE((s.matrix() - Mat::Identity(3, 3)).norm(), 1e-15);
  EXPECT_EQ(traj.times.size(), traj.states.size());
  EXPECT_EQ(traj.energies.size(), traj.states.size());
}

TEST(Flow, TwoDimensionalConvergesToPair) {
  const DiagParams d({3, 1});
  FlowOptions opts;
  opts.t_end = 200.0;
  opts.gtol = 1e-10;
  const auto traj = integrate_flow(Rotation(testing::planar(0.1)), d, opts);
  const Mat& r = traj.states.back().matrix();
  EXPECT_NEAR(r(0, 0), 0.5, 1e-8);
  EXPECT_GT(r(1, 0), 0.0);
  EXPECT_NEAR(traj.energies.back(), 2.0, 1e-10);
}

TEST(Flow, MonotoneAndReachesCriticalPoint) {
  const DiagParams d({4, 2, 1});
  const auto points = enumerate_critical(d);
  Rng rng(44);
  for (int s = 0; s < 20; ++s) {
    FlowOptions opts;
    opts.t_end = 400.0;
    opts.gtol = 1e-7;
    const auto traj = integrate_flow(random_rotation(3, rng), d, opts);
    for (std::size_t i = 1; i < traj.energies.size(); ++i) {
      EXPECT_LE(traj.energies[i], traj.energies[i - 1] + 1e-9);
    }
    for (const auto& st : traj.states) EXPECT_LE(orthogonality_defect(st.matrix()), 1e-10);
    EXPECT_LE(traj.final_grad_norm, 1e-6);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      nearest = std::min(nearest, (p.rotation.matrix() - traj.states.back().matrix()).norm());
    }
    EXPECT_LE(nearest, 1e-5);
  }
}

TEST(Flow, OversizedStepIsRejected) {
  FlowOptions opts;
  opts.step = 5.0;
  opts.t_end = 50.0;
  try {
    integrate_flow(Rotation(testing::planar(2.5)), DiagParams({6, 3}), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
  }
  opts.step = -1.0;
  EXPECT_THROW(integrate_flow(Rotation::identity(2), DiagParams({2, 1}), opts), Error);
}

TEST(BiotFlow, ConvergesToIdentityFromNearby) {
  std::mt19937_64 g(45);
  for (int s = 0; s < 20; ++s) {
    const int n = 2 + s % 4;
    const DiagParams d(testing::random_strict_diag(n, g, 0.3, 4.0));
    FlowOptions opts;
    opts.t_end = 200.0;
    opts.gtol = 1e-12;
    const auto traj = biot_flow(near_identity(n, g, 0.05), d, opts);
    for (std::size_t i = 1; i < traj.energies.size(); ++i) {
      EXPECT_LE(traj.energies[i], traj.energies[i - 1] + 1e-9);
    }
    EXPECT_LE((traj.states.back().matrix() - Mat::Identity(n, n)).norm(), 1e-6);
  }
}

TEST(BiotFlow, Energy) {
  EXPECT_DOUBLE_EQ(biot_energy(Rotation::identity(2), DiagParams({3, 1})), 2.0);
  const Rotation r(testing::planar(0.4));
  const Mat x = r.matrix() * testing::diag_matrix({3, 1}) - Mat::Identity(2, 2);
  EXPECT_NEAR(biot_energy(r, DiagParams({3, 1})), 0.5 * x.squaredNorm(), 1e-14);
}

}  // namespace
}  // namespace rpolar
