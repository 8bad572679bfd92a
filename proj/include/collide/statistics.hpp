#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "collide/matrix.hpp"

namespace collide::stats {

// Upper 1% point of the modified Kolmogorov-Smirnov statistic for an
// exponential law with mean estimated from the sample (Stephens).
inline constexpr double kStephensExponentialCritical1pct = 1.308;

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("variance needs at least two samples");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double binomial_standard_error(double p, std::size_t n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

struct Moments {
  Vector mean;
  Matrix cov;          // unbiased sample covariance
  Matrix cov_se;       // standard error of each covariance entry
  Vector mean_se;      // standard error of each mean
  std::size_t count = 0;
};

inline Moments sample_moments(std::span<const Vector> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("sample_moments needs at least two samples");
  const std::size_t d = samples.front().size();
  Moments m{Vector(d, 0.0), Matrix(d, d), Matrix(d, d), Vector(d, 0.0), n};
  for (const auto& s : samples)
    for (std::size_t i = 0; i < d; ++i) m.mean[i] += s[i];
  for (double& v : m.mean) v /= static_cast<double>(n);
  // Products (x_i - m_i)(x_j - m_j) per sample give the covariance and the
  // spread of its estimator.
  Matrix sum(d, d), sum_sq(d, d);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        const double p = (s[i] - m.mean[i]) * (s[j] - m.mean[j]);
        sum(i, j) += p;
        sum_sq(i, j) += p * p;
      }
    }
  }
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const double c = sum(i, j) / (nn - 1.0);
      const double avg = sum(i, j) / nn;
      const double spread = std::max(0.0, sum_sq(i, j) / nn - avg * avg);
      m.cov(i, j) = m.cov(j, i) = c;
      m.cov_se(i, j) = m.cov_se(j, i) = std::sqrt(spread / nn);
    }
    m.mean_se[i] = std::sqrt(m.cov(i, i) / nn);
  }
  return m;
}

struct ExponentialFit {
  double mean = 0.0;
  double ks_distance = 0.0;  // sup |F_n - F_fitted|
  double modified = 0.0;     // Stephens-modified statistic
  bool rejected_1pct = false;
};

// One-sample Kolmogorov-Smirnov test of exponentiality with the rate fitted
// from the sample mean, using Stephens' small-sample modification
// (D - 0.2/n)(sqrt(n) + 0.26 + 0.5/sqrt(n)).
inline ExponentialFit ks_exponential(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("ks_exponential needs at least two samples");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  ExponentialFit fit;
  fit.mean = mean(x);
  if (!(fit.mean > 0.0)) throw std::invalid_argument("ks_exponential: sample mean must be positive");
  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-x[i] / fit.mean);
    d = std::max({d, static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn});
  }
  fit.ks_distance = d;
  const double rn = std::sqrt(nn);
  fit.modified = (d - 0.2 / nn) * (rn + 0.26 + 0.5 / rn);
  fit.rejected_1pct = fit.modified > kStephensExponentialCritical1pct;
  return fit;
}

// Average ranks (1-based, ties share the mean rank).
inline Vector ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  Vector r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: need equal-length samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Correlation of the rank-transformed (uniformized) samples.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  const Vector rx = ranks(x), ry = ranks(y);
  return pearson(rx, ry);
}

}  // namespace collide::stats
