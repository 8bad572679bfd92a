#include <gtest/gtest.h>

#include <cstdlib>

#include "collide/experiments.hpp"

using namespace collide;

namespace {

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("COLLIDE_THREADS")) saved_ = old;
    if (value) {
      setenv("COLLIDE_THREADS", value, 1);
    } else {
      unsetenv("COLLIDE_THREADS");
    }
  }
  ~ThreadsEnv() {
    if (saved_.empty()) {
      unsetenv("COLLIDE_THREADS");
    } else {
      setenv("COLLIDE_THREADS", saved_.c_str(), 1);
    }
  }

 private:
  std::string saved_;
};

ComparisonConfig small_comparison() {
  ComparisonConfig c{Matrix{{1, -0.1}, {-0.1, 1}}, Matrix{{1, -0.9}, {-0.1, 1}}, Vector{0, 0},
                     Matrix{{2, -1}, {-1, 2}}, Vector{0.5, 0.5}};
  c.t_end = 1.0;
  c.dt = 1e-2;
  c.seeds = 16;
  c.seed = 10;
  return c;
}

}  // namespace

TEST(RunTrialsTest, ResultsAreIndexedAndThreadIndependent) {
  std::vector<std::size_t> a, b;
  {
    ThreadsEnv env("1");
    EXPECT_EQ(worker_count(100), 1u);
    a = run_trials(50, [](std::size_t i) { return i * i; });
  }
  {
    ThreadsEnv env("4");
    EXPECT_EQ(worker_count(100), 4u);
    EXPECT_EQ(worker_count(2), 2u);
    b = run_trials(50, [](std::size_t i) { return i * i; });
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[7], 49u);
}

TEST(RunTrialsTest, RejectsBadEnvironmentAndPropagatesErrors) {
  {
    ThreadsEnv env("zero");
    EXPECT_THROW(worker_count(4), std::invalid_argument);
  }
  {
    ThreadsEnv env("0");
    EXPECT_THROW(worker_count(4), std::invalid_argument);
  }
  ThreadsEnv env("3");
  EXPECT_THROW(run_trials(20,
                          [](std::size_t i) {
                            if (i == 13) throw std::runtime_error("boom");
                            return i;
                          }),
               std::runtime_error);
}

TEST(ExperimentDeterminismTest, SameSeedSameResultAcrossThreadCounts) {
  ExperimentResult one, four;
  {
    ThreadsEnv env("1");
    one = comparison_experiment(small_comparison());
  }
  {
    ThreadsEnv env("4");
    four = comparison_experiment(small_comparison());
  }
  EXPECT_EQ(one, four);
}

TEST(ComparisonTest, SmallerReflectionGivesSmallerPathOnDeterministicDriver) {
  // X1 = 1, X2 = -t: only face 2 pushes, with Y2 = t, so Z1 = 1 + r12 t.
  const Vector times = make_time_grid(1.0, 0.01);
  std::vector<Vector> x;
  for (double t : times) x.push_back({1.0, -t});
  x.front() = {1.0, 0.0};
  const Matrix r{{1, -0.5}, {-0.5, 1}};
  const Matrix r_bar{{1, -0.9}, {-0.5, 1}};
  const auto z = skorohod_map(times, x, r);
  const auto z_bar = skorohod_map(times, x, r_bar);
  for (std::size_t k = 0; k < times.size(); ++k) {
    EXPECT_NEAR(z.states[k][0], 1.0 - 0.5 * times[k], 1e-12);
    EXPECT_NEAR(z_bar.states[k][0], 1.0 - 0.9 * times[k], 1e-12);
    EXPECT_LE(z_bar.states[k][0], z.states[k][0]);
  }
}

TEST(ComparisonTest, RandomDriversRespectOrderingAndProjection) {
  const auto r = comparison_experiment(small_comparison());
  EXPECT_EQ(r.verdict, ExperimentVerdict::pass);
  EXPECT_EQ(r.estimates.at("violations"), 0.0);
  EXPECT_EQ(r.estimates.at("projection_violations"), 0.0);
  EXPECT_LE(r.estimates.at("max_excess"), kComparisonTolerance);
}

TEST(ComparisonTest, SubsetsAndPreconditions) {
  EXPECT_TRUE(comparison_subsets(1).empty());
  EXPECT_EQ(comparison_subsets(2).size(), 2u);
  EXPECT_EQ(comparison_subsets(3).size(), 6u);
  auto c = small_comparison();
  std::swap(c.r, c.r_bar);
  EXPECT_THROW(comparison_experiment(c), std::invalid_argument);
  c = small_comparison();
  c.x0 = {-1, 0};
  EXPECT_THROW(comparison_experiment(c), std::invalid_argument);
}

TEST(HittingTest, StartAtOriginAlwaysHits) {
  const auto r = hitting_probability_experiment(1.0, 0.0, 1.0, 1e-2, 10, 1);
  EXPECT_EQ(r.estimates.at("hit_probability"), 1.0);
  EXPECT_EQ(r.verdict, ExperimentVerdict::pass);
}

TEST(HittingTest, SmallRunIsInTheRightRange) {
  const auto r = hitting_probability_experiment(1.0, 0.5, 10.0, 1e-3, 400, 9);
  EXPECT_NEAR(r.estimates.at("target"), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(r.estimates.at("hit_probability"), std::exp(-1.0), 0.1);
  EXPECT_THROW(hitting_probability_experiment(-1.0, 0.5, 1.0, 0.1, 10, 1), std::invalid_argument);
  EXPECT_THROW(hitting_probability_experiment(1.0, -0.5, 1.0, 0.1, 10, 1), std::invalid_argument);
}

TEST(StationarityTest, OneDimensionalMeanIsHalf) {
  // Reflected BM with drift -1 and unit variance: Exp(2), mean 1/2.
  StationarityConfig s{SrbmSpec{Matrix{{1}}, Vector{-1}, Matrix{{1}}}};
  s.t_burn = 5;
  s.t_end = 1005;
  s.dt = 1e-2;
  s.chains = 4;
  s.seed = 17;
  const auto r = stationarity_experiment(s);
  EXPECT_NEAR(r.estimates.at("mean_1"), 0.5, 0.04);
  EXPECT_EQ(r.verdict, ExperimentVerdict::pass);
}

TEST(StationarityTest, Preconditions) {
  StationarityConfig not_skew{SrbmSpec{Matrix{{1, -0.1}, {-0.1, 1}}, Vector{-1, -1}, Matrix{{2, -1}, {-1, 2}}}};
  EXPECT_THROW(stationarity_experiment(not_skew), std::invalid_argument);
  StationarityConfig transient{SrbmSpec{Matrix{{1, -0.5}, {-0.5, 1}}, Vector{1, -1}, Matrix{{2, -1}, {-1, 2}}}};
  EXPECT_THROW(stationarity_experiment(transient), std::invalid_argument);
}

TEST(DichotomyTest, ReportsFrequenciesPerMesh) {
  DichotomyConfig d{ParticleSystemSpec::classical({0, 0, 0, 0}, {1, 0.81, 0.81, 1})};
  d.dt_list = {1e-2, 1e-3};
  d.trials = 200;
  d.seed = 3;
  const auto r = dichotomy_experiment(d);
  EXPECT_EQ(r.estimates.count("frequency@dt=0.01"), 1u);
  EXPECT_EQ(r.estimates.count("frequency@dt=0.001"), 1u);
  EXPECT_EQ(r.estimates.count("frequency_half_delta@dt=0.001"), 1u);
  for (const auto& [k, v] : r.estimates)
    if (k.starts_with("frequency")) { EXPECT_TRUE(v >= 0.0 && v <= 1.0) << k; }
  EXPECT_LE(r.estimates.at("frequency_half_delta@dt=0.001"), r.estimates.at("frequency@dt=0.001"));
}

TEST(DichotomyTest, RejectsBadConfigs) {
  DichotomyConfig d{ParticleSystemSpec::classical({0, 0, 0}, {1, 1, 1})};
  d.rank_k = 3;
  EXPECT_THROW(dichotomy_experiment(d), std::invalid_argument);
  d.rank_k = 2;
  d.dt_list = {1e-3, 1e-2};
  EXPECT_THROW(dichotomy_experiment(d), std::invalid_argument);
}

TEST(GapEquivalenceTest, SmallRunAgrees) {
  GapEquivalenceConfig g{ParticleSystemSpec::classical({1, 0, -1}, {1, 4, 9}), Vector{0, 1, 2}};
  g.dt = 1e-2;
  g.trials = 2000;
  g.seed = 5;
  const auto r = gap_equivalence_experiment(g);
  EXPECT_LT(r.estimates.at("max_abs_z"), 4.0);
  EXPECT_EQ(r.verdict, ExperimentVerdict::pass);
  GapEquivalenceConfig asym{ParticleSystemSpec{{0, 0, 0}, {1, 1, 1}, {0.5, 0.7, 0.6}, {0.3, 0.4, 0.5}},
                            Vector{0, 1, 2}};
  EXPECT_THROW(gap_equivalence_experiment(asym), std::invalid_argument);
}
