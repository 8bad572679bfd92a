#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "collide/particle_systems.hpp"
#include "collide/srbm.hpp"
#include "oracles.hpp"

using namespace collide;

namespace {

SrbmSpec spec_2d() { return SrbmSpec{Matrix{{1, -0.5}, {-0.5, 1}}, Vector{-0.2, 0.1}, Matrix{{2, -1}, {-1, 2}}}; }

std::vector<Vector> random_walk(std::size_t d, std::size_t steps, std::mt19937_64& rng, double start = 0.5) {
  std::normal_distribution<double> n(0.0, 0.05);
  std::vector<Vector> x(steps + 1, Vector(d, start));
  for (std::size_t k = 1; k <= steps; ++k)
    for (std::size_t i = 0; i < d; ++i) x[k][i] = x[k - 1][i] + n(rng);
  return x;
}

}  // namespace

TEST(TimeGridTest, UniformWithShortLastStep) {
  EXPECT_EQ(make_time_grid(1.0, 0.25), (Vector{0, 0.25, 0.5, 0.75, 1.0}));
  const auto g = make_time_grid(1.0, 0.3);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[3], 0.9);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(make_time_grid(1.0, 1e-3).size(), 1001u);
  EXPECT_THROW(make_time_grid(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(make_time_grid(0.1, 0.2), std::invalid_argument);
}

TEST(SkorohodSolverTest, InteriorPointNeedsNoPush) {
  const auto s = skorohod_step(Vector{1, 2}, Vector{0.1, -0.5}, spec_2d().r);
  EXPECT_EQ(s.dy, (Vector{0, 0}));
  EXPECT_EQ(s.z_next, (Vector{1.1, 1.5}));
}

TEST(SkorohodSolverTest, HandComputedCorner) {
  // q = (-1, -1), R = [[1, -.5], [-.5, 1]]: both faces active, dy = R^{-1}(1, 1) = (2, 2).
  const auto s = skorohod_step(Vector{0, 0}, Vector{-1, -1}, spec_2d().r);
  EXPECT_NEAR(s.dy[0], 2.0, 1e-12);
  EXPECT_NEAR(s.dy[1], 2.0, 1e-12);
  EXPECT_NEAR(s.z_next[0], 0.0, 1e-12);
  EXPECT_NEAR(s.z_next[1], 0.0, 1e-12);
}

TEST(SkorohodSolverTest, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t d = 1; d <= 6; ++d) {
    for (int t = 0; t < 300; ++t) {
      const Matrix r = oracle::random_reflection_m(d, rng);
      Vector q(d);
      for (double& v : q) v = n(rng);
      SkorohodSolver solver(r);
      Vector dy(d), w(d);
      solver.solve(q, dy, w);
      const auto ref = oracle::brute_force_lcp(q, r);
      ASSERT_TRUE(ref.has_value());
      for (std::size_t i = 0; i < d; ++i) {
        EXPECT_NEAR(dy[i], ref->dy[i], 1e-9);
        EXPECT_NEAR(w[i], ref->w[i], 1e-9);
      }
    }
  }
}

TEST(SkorohodSolverTest, ComplementarityOnRandomProblems) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t d = 2 + t % 7;
    const Matrix r = oracle::random_reflection_m(d, rng);
    Vector q(d);
    for (double& v : q) v = n(rng);
    SkorohodSolver solver(r);
    Vector dy(d), w(d);
    solver.solve(q, dy, w);
    const Vector rdy = r * dy;
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_GE(dy[i], 0.0);
      EXPECT_GE(w[i], 0.0);
      EXPECT_LE(dy[i] * w[i], 1e-12);
      EXPECT_NEAR(w[i], q[i] + rdy[i], 1e-10);
    }
  }
}

TEST(SkorohodMapTest, OneDimensionalFormula) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_walk(1, 500, rng, 0.1);
    const Vector times = make_time_grid(500.0, 1.0);
    const auto path = skorohod_map(times, x, Matrix::identity(1));
    std::vector<double> flat;
    for (const auto& v : x) flat.push_back(v[0]);
    const auto ref = oracle::reflect_1d(flat);
    for (std::size_t k = 0; k < x.size(); ++k) {
      EXPECT_NEAR(path.states[k][0], ref[k], 1e-12);
      EXPECT_NEAR(path.regulators[k][0], ref[k] - flat[k], 1e-12);
    }
  }
}

TEST(SkorohodMapTest, RegulatorIncreasesOnlyOnFaces) {
  std::mt19937_64 rng(9);
  const Matrix r = oracle::random_reflection_m(3, rng);
  const auto x = random_walk(3, 2000, rng, 0.05);
  const auto path = skorohod_map(make_time_grid(2000.0, 1.0), x, r);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Vector rz = r * path.regulators[k];
    for (std::size_t i = 0; i < 3; ++i) {
      const double inc = path.regulators[k][i] - path.regulators[k - 1][i];
      EXPECT_GE(inc, 0.0);
      if (inc > 1e-12) { EXPECT_LE(path.states[k][i], 1e-10); }
      EXPECT_NEAR(path.states[k][i], x[k][i] + rz[i], 1e-9);
    }
  }
}

TEST(SkorohodMapTest, RejectsBadInput) {
  EXPECT_THROW(skorohod_map(Vector{0, 1}, std::vector<Vector>{{1.0}}, Matrix::identity(1)), std::invalid_argument);
  EXPECT_THROW(skorohod_map(Vector{0}, std::vector<Vector>{{-1.0}}, Matrix::identity(1)), std::invalid_argument);
  EXPECT_THROW(skorohod_step(Vector{-1}, Vector{0}, Matrix::identity(1)), std::invalid_argument);
}

TEST(SimulateSrbmTest, ZeroNoiseOneDimensional) {
  SrbmSpec s{Matrix::identity(1), Vector{-1}, Matrix{{0}}, true};
  const auto path = simulate_srbm(s, Vector{0}, 1.0, 0.01, 1);
  for (std::size_t k = 0; k < path.size(); ++k) {
    EXPECT_EQ(path.states[k][0], 0.0);
    EXPECT_NEAR(path.regulators[k][0], path.times[k], 1e-12);
  }
}

TEST(SimulateSrbmTest, ZeroNoiseDriftsOffBeforeHittingFace) {
  SrbmSpec s{Matrix::identity(1), Vector{-1}, Matrix{{0}}, true};
  const auto path = simulate_srbm(s, Vector{0.5}, 1.0, 0.125, 1, Discretization::bridge);
  EXPECT_NEAR(path.states[2][0], 0.25, 1e-12);
  EXPECT_NEAR(path.regulators[4][0], 0.0, 1e-12);
  EXPECT_NEAR(path.regulators.back()[0], 0.5, 1e-12);
  EXPECT_EQ(path.states.back()[0], 0.0);
}

TEST(SimulateSrbmTest, DeterministicForFixedSeed) {
  for (auto scheme : {Discretization::projected, Discretization::bridge}) {
    const auto a = simulate_srbm(spec_2d(), Vector{0.1, 0.2}, 1.0, 1e-3, 77, scheme);
    const auto b = simulate_srbm(spec_2d(), Vector{0.1, 0.2}, 1.0, 1e-3, 77, scheme);
    const auto c = simulate_srbm(spec_2d(), Vector{0.1, 0.2}, 1.0, 1e-3, 78, scheme);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.regulators, b.regulators);
    EXPECT_NE(a.states, c.states);
  }
}

TEST(SimulateSrbmTest, ProjectedPathSatisfiesSkorohodIdentity) {
  const auto path = simulate_srbm(spec_2d(), Vector{0.1, 0.2}, 2.0, 1e-3, 5);
  const Matrix& r = spec_2d().r;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Vector push = r * path.regulators[k];
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_GE(path.states[k][i], 0.0);
      EXPECT_NEAR(path.states[k][i], (*path.driver)[k][i] + push[i], 1e-9);
    }
  }
}

TEST(SimulateSrbmTest, BridgeStatesStayInOrthant) {
  const auto path = simulate_srbm(spec_2d(), Vector{0.0, 0.0}, 2.0, 1e-3, 5, Discretization::bridge);
  for (const auto& z : path.states)
    for (double v : z) EXPECT_GE(v, 0.0);
}

TEST(SimulateSrbmTest, RejectsInvalidSpecs) {
  SrbmSpec bad{Matrix{{1, -2}, {-2, 1}}, Vector{0, 0}, Matrix::identity(2)};
  EXPECT_THROW(simulate_srbm(bad, Vector{0, 0}, 1.0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(simulate_srbm(spec_2d(), Vector{0, -1}, 1.0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(simulate_srbm(spec_2d(), Vector{0}, 1.0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(parse_discretization("euler"), std::invalid_argument);
}

TEST(RankedSimulationTest, GapsMatchPositionsAndOrderIsKept) {
  const auto spec = ParticleSystemSpec{{0.5, 0, -0.5}, {1, 2, 1.5}, {0.5, 0.7, 0.6}, {0.3, 0.4, 0.5}};
  const auto sim = simulate_ranked(spec, Vector{0, 0.1, 0.3}, 2.0, 1e-3, 3);
  for (std::size_t k = 0; k < sim.ranked.positions.size(); ++k) {
    const auto& y = sim.ranked.positions[k];
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
      EXPECT_LE(y[i], y[i + 1]);
      EXPECT_NEAR(y[i + 1] - y[i], sim.gaps.states[k][i], 1e-10);
    }
  }
}

TEST(RankedSimulationTest, ZeroNoiseSpreadsAtRelativeDrift) {
  const auto spec = ParticleSystemSpec::classical({0, 1, 2}, {1, 1, 1});
  const auto sim = simulate_ranked(spec, Vector{0, 0, 0}, 1.0, 0.01, 1, true);
  EXPECT_NEAR(sim.ranked.positions.back()[0], 0.0, 1e-12);
  EXPECT_NEAR(sim.ranked.positions.back()[2], 2.0, 1e-12);
  EXPECT_NEAR(sim.gaps.states.back()[0], 1.0, 1e-12);
}

TEST(RankedSimulationTest, ZeroNoiseCollapsingDriftsSplitLocalTime) {
  // Drifts pushing the two particles together: the gap stays at 0 and the
  // pair moves at the weighted average drift.
  const auto spec = ParticleSystemSpec::classical({1, -1}, {1, 1});
  const auto sim = simulate_ranked(spec, Vector{0, 0}, 1.0, 0.01, 1, true);
  EXPECT_NEAR(sim.gaps.states.back()[0], 0.0, 1e-12);
  EXPECT_NEAR(sim.gaps.regulators.back()[0], 2.0, 1e-12);
  EXPECT_NEAR(sim.ranked.positions.back()[0], 0.0, 1e-12);
  EXPECT_NEAR(sim.ranked.positions.back()[1], 0.0, 1e-12);
}

TEST(NamedSimulationTest, RankHistoryIsConsistent) {
  const auto spec = ParticleSystemSpec::classical({1, 0, -1}, {1, 4, 9});
  const auto path = simulate_named(spec, Vector{0, 1, 2}, 1.0, 1e-3, 2);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const auto& p = path.rank_history[k].rank_to_name;
    for (std::size_t r = 1; r < p.size(); ++r) EXPECT_LE(path.positions[k][p[r - 1]], path.positions[k][p[r]]);
  }
  EXPECT_THROW(simulate_named(ParticleSystemSpec{{0, 0, 0}, {1, 1, 1}, {0.5, 0.7, 0.6}, {0.3, 0.4, 0.5}},
                              Vector{0, 1, 2}, 1.0, 0.1, 1),
               std::invalid_argument);
}

TEST(DetectCollisionsTest, CountsHandBuiltPath) {
  SimulatedPath p;
  p.times = {0, 1, 2, 3};
  p.states = {{0.5, 0.5, 0.5}, {0.0, 0.0, 0.5}, {0.0, 0.0005, 0.0}, {0.2, 0.0, 0.0}};
  const auto r = detect_collisions(p, 1e-3);
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_EQ(r.near_simultaneous_count, (std::vector<std::size_t>{2, 1, 2}));
  EXPECT_EQ(r.near_triple_count, (std::vector<std::size_t>{2, 2}));
  EXPECT_DOUBLE_EQ(r.pairs[0].min_max, 0.0);
  EXPECT_DOUBLE_EQ(r.pairs[1].min_max, 0.0);
  EXPECT_DOUBLE_EQ(r.pairs[2].min_max, 0.0);
  EXPECT_THROW(detect_collisions(p, 0.0), std::invalid_argument);
}
