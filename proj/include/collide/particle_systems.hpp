#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "collide/matrix.hpp"
#include "collide/matrix_analysis.hpp"
#include "collide/srbm_spec.hpp"

namespace collide {

inline constexpr double kCollisionWeightTolerance = 1e-12;
inline constexpr double kSkewSymmetryTolerance = 1e-10;
// Relative tolerance under which a condition slack counts as zero.
inline constexpr double kConditionTolerance = 1e-12;

// A finite system of competing Brownian particles with rank-dependent drifts
// g_k, squared diffusions sigma_k^2 and collision weights q+_k, q-_k.
// Vectors are indexed by rank, 0-based.
struct ParticleSystemSpec {
  Vector drifts;
  Vector sigma2;
  Vector q_plus;
  Vector q_minus;

  std::size_t n() const { return drifts.size(); }

  static ParticleSystemSpec classical(Vector drifts, Vector sigma2) {
    const std::size_t n = drifts.size();
    return {std::move(drifts), std::move(sigma2), Vector(n, 0.5), Vector(n, 0.5)};
  }

  bool is_classical() const {
    auto half = [](double q) { return q == 0.5; };
    return std::all_of(q_plus.begin(), q_plus.end(), half) &&
           std::all_of(q_minus.begin(), q_minus.end(), half);
  }

  void validate() const {
    const std::size_t count = n();
    if (count < 2) throw std::invalid_argument("particle count must be at least 2");
    if (sigma2.size() != count || q_plus.size() != count || q_minus.size() != count) {
      throw std::invalid_argument("drifts, sigma2, q_plus and q_minus must all have length " +
                                  std::to_string(count));
    }
    for (std::size_t k = 0; k < count; ++k) {
      if (!std::isfinite(drifts[k])) throw std::invalid_argument("drifts must be finite");
      if (!(sigma2[k] > 0.0) || !std::isfinite(sigma2[k])) {
        throw std::invalid_argument("sigma2[" + std::to_string(k + 1) + "] must be positive");
      }
      if (!(q_plus[k] > 0.0 && q_plus[k] < 1.0)) {
        throw std::invalid_argument("q_plus[" + std::to_string(k + 1) + "] must lie in (0,1)");
      }
      if (!(q_minus[k] > 0.0 && q_minus[k] < 1.0)) {
        throw std::invalid_argument("q_minus[" + std::to_string(k + 1) + "] must lie in (0,1)");
      }
    }
    for (std::size_t k = 0; k + 1 < count; ++k) {
      if (std::abs(q_plus[k + 1] + q_minus[k] - 1.0) > kCollisionWeightTolerance) {
        throw std::invalid_argument("q_plus[" + std::to_string(k + 2) + "] + q_minus[" +
                                    std::to_string(k + 1) + "] must equal 1");
      }
    }
  }
};

// rank_to_name[k] is the (0-based) name of the particle with rank k.
struct RankingPermutation {
  std::vector<std::size_t> rank_to_name;

  std::vector<std::size_t> name_to_rank() const {
    std::vector<std::size_t> inv(rank_to_name.size());
    for (std::size_t k = 0; k < rank_to_name.size(); ++k) inv[rank_to_name[k]] = k;
    return inv;
  }

  friend bool operator==(const RankingPermutation&, const RankingPermutation&) = default;
};

// Ranks by value; ties go to the smaller name first.
inline RankingPermutation ranking_permutation(std::span<const double> x) {
  RankingPermutation p;
  p.rank_to_name.resize(x.size());
  std::iota(p.rank_to_name.begin(), p.rank_to_name.end(), std::size_t{0});
  std::stable_sort(p.rank_to_name.begin(), p.rank_to_name.end(),
                   [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return p;
}

// Allocation-free variant; `out` must have size x.size().
inline void ranking_permutation(std::span<const double> x, std::span<std::size_t> out) {
  std::iota(out.begin(), out.end(), std::size_t{0});
  std::stable_sort(out.begin(), out.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
}

enum class ConditionKind { classical_concavity, asymmetric, srbm_ssineq };

inline std::string_view to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::classical_concavity: return "classical_concavity";
    case ConditionKind::asymmetric: return "asymmetric";
    case ConditionKind::srbm_ssineq: return "srbm_ssineq";
  }
  return "unknown";
}

// One condition instance. For per-rank conditions i == j is the (1-based)
// rank; for pairwise conditions (i, j) is the 1-based pair with i < j.
struct Verdict {
  std::size_t i = 0;
  std::size_t j = 0;
  bool holds = true;
  double slack = 0.0;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct ConditionReport {
  ConditionKind kind = ConditionKind::classical_concavity;
  std::vector<Verdict> verdicts;
  bool overall_avoids = true;

  const Verdict* find(std::size_t i, std::size_t j) const {
    for (const auto& v : verdicts)
      if (v.i == i && v.j == j) return &v;
    return nullptr;
  }

  friend bool operator==(const ConditionReport&, const ConditionReport&) = default;
};

namespace detail {

inline bool slack_holds(double slack, double scale) {
  return slack >= -kConditionTolerance * std::max(1.0, scale);
}

inline void finish(ConditionReport& report) {
  report.overall_avoids = std::all_of(report.verdicts.begin(), report.verdicts.end(),
                                      [](const Verdict& v) { return v.holds; });
}

}  // namespace detail

// sigma^2_{k+1} - sigma^2_k <= sigma^2_k - sigma^2_{k-1} for interior ranks.
inline ConditionReport check_concavity(std::span<const double> sigma2) {
  for (double s : sigma2) {
    if (!(s > 0.0)) throw std::invalid_argument("sigma2 entries must be positive");
  }
  ConditionReport report{ConditionKind::classical_concavity, {}, true};
  for (std::size_t k = 1; k + 1 < sigma2.size(); ++k) {
    const double slack = (sigma2[k] - sigma2[k - 1]) - (sigma2[k + 1] - sigma2[k]);
    const double scale = std::max({sigma2[k - 1], sigma2[k], sigma2[k + 1]});
    report.verdicts.push_back({k + 1, k + 1, detail::slack_holds(slack, scale), slack});
  }
  detail::finish(report);
  return report;
}

// (q-_{k-1} + q+_{k+1}) sigma^2_k >= q-_k sigma^2_{k+1} + q+_k sigma^2_{k-1}.
inline ConditionReport check_asymmetric(const ParticleSystemSpec& spec) {
  spec.validate();
  const auto& s = spec.sigma2;
  const auto& qp = spec.q_plus;
  const auto& qm = spec.q_minus;
  ConditionReport report{ConditionKind::asymmetric, {}, true};
  for (std::size_t k = 1; k + 1 < spec.n(); ++k) {
    const double lhs = (qm[k - 1] + qp[k + 1]) * s[k];
    const double rhs = qm[k] * s[k + 1] + qp[k] * s[k - 1];
    const double slack = lhs - rhs;
    report.verdicts.push_back({k + 1, k + 1, detail::slack_holds(slack, std::max(lhs, rhs)), slack});
  }
  detail::finish(report);
  return report;
}

// Parameters of the gap process Z_k = Y_{k+1} - Y_k.
inline SrbmSpec to_srbm(const ParticleSystemSpec& spec) {
  spec.validate();
  const std::size_t d = spec.n() - 1;
  SrbmSpec out{Matrix::identity(d), Vector(d), Matrix(d, d)};
  for (std::size_t k = 0; k < d; ++k) {
    out.mu[k] = spec.drifts[k + 1] - spec.drifts[k];
    out.a(k, k) = spec.sigma2[k] + spec.sigma2[k + 1];
    if (k + 1 < d) {
      out.r(k, k + 1) = -spec.q_minus[k + 1];
      out.r(k + 1, k) = -spec.q_plus[k + 1];
      out.a(k, k + 1) = out.a(k + 1, k) = -spec.sigma2[k + 1];
    }
  }
  if (!is_reflection_nonsingular_m(out.r)) {
    throw NumericalError("gap reflection matrix failed the nonsingular M-matrix check");
  }
  return out;
}

namespace detail {

inline void require_srbm_pair(const Matrix& r, const Matrix& a, const char* what) {
  if (!r.square() || !a.square() || r.rows() != a.rows()) {
    throw std::invalid_argument(std::string(what) + ": R and A must be square of equal dimension");
  }
  if (!is_reflection_nonsingular_m(r)) {
    throw std::invalid_argument(std::string(what) + ": R must be a reflection nonsingular M-matrix");
  }
  if (!is_symmetric_positive_definite(a)) {
    throw std::invalid_argument(std::string(what) + ": A must be symmetric positive definite");
  }
}

}  // namespace detail

// r_ij a_jj + r_ji a_ii >= 2 a_ij for every pair i < j.
inline ConditionReport check_ssineq(const Matrix& r, const Matrix& a) {
  detail::require_srbm_pair(r, a, "check_ssineq");
  ConditionReport report{ConditionKind::srbm_ssineq, {}, true};
  const std::size_t d = r.rows();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double lhs = r(i, j) * a(j, j) + r(j, i) * a(i, i);
      const double rhs = 2.0 * a(i, j);
      const double slack = lhs - rhs;
      const double scale = std::max({std::abs(r(i, j) * a(j, j)), std::abs(r(j, i) * a(i, i)), std::abs(rhs)});
      report.verdicts.push_back({i + 1, j + 1, detail::slack_holds(slack, scale), slack});
    }
  }
  detail::finish(report);
  return report;
}

// R D + D R' = 2 A with D = diag(A), entrywise within kSkewSymmetryTolerance.
inline bool check_skew_symmetry(const Matrix& r, const Matrix& a) {
  detail::require_srbm_pair(r, a, "check_skew_symmetry");
  const std::size_t d = r.rows();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (std::abs(r(i, j) * a(j, j) + r(j, i) * a(i, i) - 2.0 * a(i, j)) > kSkewSymmetryTolerance) return false;
  return true;
}

// Lowers the upper-triangular entries of R until the skew-symmetry condition
// holds with equality; the lower triangle is kept.
inline Matrix skew_symmetric_minorant(const Matrix& r, const Matrix& a) {
  const auto ss = check_ssineq(r, a);
  if (!ss.overall_avoids) {
    throw std::invalid_argument("skew_symmetric_minorant: pairwise inequality violated, minorant would exceed R");
  }
  const std::size_t d = r.rows();
  Matrix out = Matrix::identity(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      out(i, j) = (2.0 * a(i, j) - r(j, i) * a(i, i)) / a(j, j);
      out(j, i) = r(j, i);
    }
  }
  if (!is_reflection_nonsingular_m(out)) {
    throw NumericalError("skew_symmetric_minorant: result is not a nonsingular M-matrix");
  }
  return out;
}

// Per interior rank k: holds == "triple collisions at ranks k-1, k, k+1
// are a.s. avoided". Cross-checks the particle-form condition against the
// pairwise orthant condition on the gap matrices.
inline ConditionReport predict_behavior(const ParticleSystemSpec& spec) {
  auto particle = check_asymmetric(spec);
  const auto gap = to_srbm(spec);
  const auto orthant = check_ssineq(gap.r, gap.a);
  for (const auto& v : orthant.verdicts) {
    if (v.j != v.i + 1 && !v.holds) {
      throw NumericalError("non-adjacent gap pair (" + std::to_string(v.i) + "," + std::to_string(v.j) +
                           ") violates the pairwise inequality");
    }
  }
  for (auto& v : particle.verdicts) {
    const std::size_t k = v.i;  // interior rank, 1-based
    const Verdict* pair = orthant.find(k - 1, k);
    if (pair == nullptr) throw NumericalError("missing gap pair verdict");
    const double scale = std::max({1.0, spec.sigma2[k - 2], spec.sigma2[k - 1], spec.sigma2[k]});
    if (pair->holds != v.holds && std::abs(pair->slack - v.slack) > 1e-10 * scale) {
      throw NumericalError("condition routes disagree at rank " + std::to_string(k) +
                           ": particle slack " + std::to_string(v.slack) + ", gap slack " +
                           std::to_string(pair->slack));
    }
  }
  return particle;
}

}  // namespace collide
