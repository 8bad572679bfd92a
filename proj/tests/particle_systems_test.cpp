#include <gtest/gtest.h>

#include <random>

#include "collide/matrix_analysis.hpp"
#include "collide/particle_systems.hpp"
#include "oracles.hpp"

using namespace collide;

namespace {

// Random valid weights: q+_{k+1} = 1 - q-_k, interior values drawn freely.
ParticleSystemSpec random_spec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> q(0.05, 0.95), s(0.1, 3.0), g(-1.0, 1.0);
  ParticleSystemSpec spec;
  spec.drifts.resize(n);
  spec.sigma2.resize(n);
  spec.q_plus.resize(n);
  spec.q_minus.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    spec.drifts[k] = g(rng);
    spec.sigma2[k] = s(rng);
    spec.q_minus[k] = q(rng);
  }
  spec.q_plus[0] = q(rng);
  for (std::size_t k = 0; k + 1 < n; ++k) spec.q_plus[k + 1] = 1.0 - spec.q_minus[k];
  return spec;
}

}  // namespace

TEST(RankingTest, TieRuleAndExamples) {
  // Names and ranks are 0-based here; the 1-based reading is (2, 3, 4, 1).
  EXPECT_EQ(ranking_permutation(Vector{1, -1, 0, 0}).rank_to_name, (std::vector<std::size_t>{1, 2, 3, 0}));
  EXPECT_EQ(ranking_permutation(Vector{1, 2, 3}).rank_to_name, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(ranking_permutation(Vector{5, 5, 5}).rank_to_name, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RankingTest, InverseAndSortedProperty) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(-3, 3);
  for (int t = 0; t < 200; ++t) {
    Vector x(7);
    for (double& e : x) e = v(rng);
    const auto p = ranking_permutation(x);
    const auto inv = p.name_to_rank();
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(inv[p.rank_to_name[k]], k);
    for (std::size_t k = 1; k < x.size(); ++k) {
      EXPECT_LE(x[p.rank_to_name[k - 1]], x[p.rank_to_name[k]]);
      if (x[p.rank_to_name[k - 1]] == x[p.rank_to_name[k]]) { EXPECT_LT(p.rank_to_name[k - 1], p.rank_to_name[k]); }
    }
  }
}

TEST(SpecTest, ValidationNamesTheViolatedInvariant) {
  auto s = ParticleSystemSpec::classical({0, 0, 0}, {1, 1, 1});
  EXPECT_NO_THROW(s.validate());
  s.q_plus[1] = 0.6;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  auto t = ParticleSystemSpec::classical({0, 0}, {1, -1});
  EXPECT_THROW(t.validate(), std::invalid_argument);
  auto u = ParticleSystemSpec::classical({0}, {1});
  EXPECT_THROW(u.validate(), std::invalid_argument);
}

TEST(ConcavityTest, Examples) {
  const auto flat = check_concavity(Vector{1, 1, 1});
  EXPECT_TRUE(flat.overall_avoids);
  EXPECT_EQ(flat.verdicts.size(), 1u);
  EXPECT_EQ(flat.verdicts[0].slack, 0.0);

  const auto dip = check_concavity(Vector{1, 0.81, 0.81, 1});
  EXPECT_FALSE(dip.overall_avoids);
  ASSERT_EQ(dip.verdicts.size(), 2u);
  EXPECT_FALSE(dip.find(2, 2)->holds);
  EXPECT_FALSE(dip.find(3, 3)->holds);
  EXPECT_NEAR(dip.find(2, 2)->slack, -0.19, 1e-12);

  const auto rising = check_concavity(Vector{1, 2, 2.5});
  EXPECT_TRUE(rising.overall_avoids);
  EXPECT_NEAR(rising.verdicts[0].slack, 0.5, 1e-12);

  // A peaked profile is concave: slack (1.21 - 1) - (1 - 1.21) = 0.42.
  const auto peak = check_concavity(Vector{1, 1.21, 1});
  EXPECT_TRUE(peak.overall_avoids);
  EXPECT_NEAR(peak.verdicts[0].slack, 0.42, 1e-12);

  EXPECT_TRUE(check_concavity(Vector{1, 2}).overall_avoids);
  EXPECT_THROW(check_concavity(Vector{1, 0, 1}), std::invalid_argument);
}

TEST(AsymmetricTest, Examples) {
  ParticleSystemSpec s{{0, 0, 0}, {1, 1, 1}, {0.5, 0.7, 0.6}, {0.3, 0.4, 0.5}};
  const auto r = check_asymmetric(s);
  ASSERT_EQ(r.verdicts.size(), 1u);
  EXPECT_FALSE(r.verdicts[0].holds);
  EXPECT_NEAR(r.verdicts[0].slack, 0.9 - 1.1, 1e-12);
  EXPECT_TRUE(check_asymmetric(ParticleSystemSpec::classical({0, 0}, {1, 3})).overall_avoids);
}

TEST(AsymmetricTest, ReducesToConcavityForClassicalWeights) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> s(0.1, 3.0);
  for (int t = 0; t < 300; ++t) {
    Vector sigma2(3 + t % 5);
    for (double& v : sigma2) v = s(rng);
    const auto spec = ParticleSystemSpec::classical(Vector(sigma2.size(), 0.0), sigma2);
    const auto a = check_asymmetric(spec);
    const auto c = check_concavity(sigma2);
    ASSERT_EQ(a.verdicts.size(), c.verdicts.size());
    for (std::size_t k = 0; k < a.verdicts.size(); ++k) {
      EXPECT_EQ(a.verdicts[k].holds, c.verdicts[k].holds);
      EXPECT_NEAR(a.verdicts[k].slack, 0.5 * c.verdicts[k].slack, 1e-12);
    }
  }
}

TEST(ToSrbmTest, Examples) {
  const auto g = to_srbm(ParticleSystemSpec::classical({0, 0, 0}, {1, 1, 1}));
  EXPECT_EQ(g.r, (Matrix{{1, -0.5}, {-0.5, 1}}));
  EXPECT_EQ(g.a, (Matrix{{2, -1}, {-1, 2}}));
  EXPECT_EQ(g.mu, (Vector{0, 0}));

  const auto one = to_srbm(ParticleSystemSpec::classical({1, 3}, {1, 4}));
  EXPECT_EQ(one.r, (Matrix{{1}}));
  EXPECT_EQ(one.a, (Matrix{{5}}));
  EXPECT_EQ(one.mu, (Vector{2}));

  const auto asym = to_srbm(ParticleSystemSpec{{0, 0, 0}, {1, 1, 1}, {0.5, 0.7, 0.6}, {0.3, 0.4, 0.5}});
  EXPECT_EQ(asym.r, (Matrix{{1, -0.4}, {-0.7, 1}}));
}

TEST(ToSrbmTest, DriftUsesConsecutiveDifferences) {
  const auto g = to_srbm(ParticleSystemSpec::classical({1, 2, 4, 8}, {1, 1, 1, 1}));
  EXPECT_EQ(g.mu, (Vector{1, 2, 4}));
}

TEST(ToSrbmTest, GapReflectionIsAlwaysM) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto spec = random_spec(2 + t % 8, rng);
    EXPECT_TRUE(classify(to_srbm(spec).r).is_nonsingular_m);
  }
}

TEST(SsineqTest, Examples) {
  const auto eq = check_ssineq(Matrix{{1, -0.5}, {-0.5, 1}}, Matrix{{2, -1}, {-1, 2}});
  EXPECT_TRUE(eq.overall_avoids);
  EXPECT_NEAR(eq.verdicts[0].slack, 0.0, 1e-15);
  EXPECT_TRUE(check_ssineq(Matrix::identity(2), Matrix::identity(2)).overall_avoids);
  const auto fail = check_ssineq(Matrix::identity(2), Matrix{{1, 0.5}, {0.5, 1}});
  EXPECT_FALSE(fail.overall_avoids);
  EXPECT_EQ(fail.verdicts[0].i, 1u);
  EXPECT_EQ(fail.verdicts[0].j, 2u);
  EXPECT_NEAR(fail.verdicts[0].slack, -1.0, 1e-15);
  EXPECT_THROW(check_ssineq(Matrix::identity(2), Matrix::identity(3)), std::invalid_argument);
  EXPECT_THROW(check_ssineq(Matrix{{1, -2}, {-2, 1}}, Matrix::identity(2)), std::invalid_argument);
}

TEST(SsineqTest, GapFormMatchesParticleFormAndOnlyAdjacentPairsFail) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 500; ++t) {
    const auto spec = random_spec(3 + t % 6, rng);
    const auto gap = to_srbm(spec);
    const auto orthant = check_ssineq(gap.r, gap.a);
    const auto particle = check_asymmetric(spec);
    for (const auto& v : orthant.verdicts) {
      if (v.j != v.i + 1) { EXPECT_TRUE(v.holds) << v.i << "," << v.j; }
    }
    for (const auto& v : particle.verdicts) {
      const auto* pair = orthant.find(v.i - 1, v.i);
      ASSERT_NE(pair, nullptr);
      EXPECT_EQ(pair->holds, v.holds);
      EXPECT_NEAR(pair->slack, v.slack, 1e-12);
    }
  }
}

TEST(SkewSymmetryTest, Examples) {
  EXPECT_TRUE(check_skew_symmetry(Matrix{{1, -0.5}, {-0.5, 1}}, Matrix{{2, -1}, {-1, 2}}));
  EXPECT_TRUE(check_skew_symmetry(Matrix::identity(2), Matrix::identity(2)));
  EXPECT_FALSE(check_skew_symmetry(Matrix{{1, -0.1}, {-0.1, 1}}, Matrix{{2, -1}, {-1, 2}}));
}

TEST(MinorantTest, Examples) {
  EXPECT_EQ(skew_symmetric_minorant(Matrix::identity(2), Matrix::identity(2)), Matrix::identity(2));
  const Matrix r{{1, -0.5}, {-0.5, 1}};
  EXPECT_LE(skew_symmetric_minorant(r, Matrix{{2, -1}, {-1, 2}}).max_abs_diff(r), 1e-15);
  const auto m = skew_symmetric_minorant(Matrix{{1, -0.1}, {-0.1, 1}}, Matrix{{2, -1}, {-1, 2}});
  EXPECT_LE(m.max_abs_diff(Matrix{{1, -0.9}, {-0.1, 1}}), 1e-15);
  EXPECT_THROW(skew_symmetric_minorant(Matrix::identity(2), Matrix{{1, 0.5}, {0.5, 1}}), std::invalid_argument);
}

TEST(MinorantTest, PropertiesOnRandomInputs) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int t = 0; t < 2000 && checked < 300; ++t) {
    const std::size_t d = 2 + t % 4;
    const Matrix r = oracle::random_reflection_m(d, rng);
    const Matrix a = oracle::random_spd(d, rng);
    if (!check_ssineq(r, a).overall_avoids) continue;
    ++checked;
    const Matrix m = skew_symmetric_minorant(r, a);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) EXPECT_LE(m(i, j), r(i, j) + 1e-12);
    EXPECT_TRUE(check_skew_symmetry(m, a));
    EXPECT_TRUE(classify(m).is_nonsingular_m);
  }
  EXPECT_GT(checked, 50);
}

TEST(PredictBehaviorTest, Examples) {
  EXPECT_TRUE(predict_behavior(ParticleSystemSpec::classical({0, 0, 0}, {1, 1, 1})).overall_avoids);
  const auto dip = predict_behavior(ParticleSystemSpec::classical({0, 0, 0, 0}, {1, 0.81, 0.81, 1}));
  EXPECT_FALSE(dip.find(2, 2)->holds);
  EXPECT_FALSE(dip.find(3, 3)->holds);
  EXPECT_TRUE(predict_behavior(ParticleSystemSpec::classical({0, 0, 0}, {1, 1.21, 1})).overall_avoids);
  const auto asym = predict_behavior(ParticleSystemSpec{{0, 0, 0}, {1, 1, 1}, {0.5, 0.7, 0.6}, {0.3, 0.4, 0.5}});
  EXPECT_FALSE(asym.overall_avoids);
}
