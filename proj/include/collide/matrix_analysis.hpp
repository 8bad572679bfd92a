#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "collide/matrix.hpp"

namespace collide {

inline constexpr std::size_t kMaxDimension = 16;
inline constexpr double kPivotTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kMarginalBand = 1e-10;

struct MatrixClassReport {
  bool is_reflection = false;
  bool is_z = false;
  bool is_s = false;
  bool is_completely_s = false;
  bool is_nonsingular_m = false;
  // rho(I - R); present only for reflection matrices.
  std::optional<double> spectral_radius_of_q;
  // Set when rho(Q) lies within kMarginalBand of the M-matrix threshold.
  bool marginal = false;
};

struct SymmetricEigen {
  Vector values;
  Matrix vectors;  // eigenvectors stored as columns
};

struct SpdRoots {
  Matrix root;          // A^(1/2)
  Matrix inverse_root;  // A^(-1/2)
};

namespace detail {

inline void require_square(const Matrix& m, const char* what) {
  if (m.empty() || !m.square()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
  if (m.rows() > kMaxDimension) {
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(m.rows()) +
                                " exceeds limit " + std::to_string(kMaxDimension));
  }
}

// Scales rows and columns by powers of two so that row and column norms are
// comparable; preserves eigenvalues exactly.
inline void balance(Matrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations.
inline void to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
// iteration. Destroys `a`.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> wr(n), wi(n);
  auto at = [&a](int i, int j) -> double& {
    return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  auto sign = [](double mag, double s) { return s >= 0.0 ? std::abs(mag) : -std::abs(mag); };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(at(i, j));

  int nn = n - 1;
  double t = 0.0;
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(at(l, l - 1)) + s == s) {
          at(l, l - 1) = 0.0;
          break;
        }
      }
      x = at(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        y = at(nn - 1, nn - 1);
        w = at(nn, nn - 1) * at(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + w;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its == 60) throw NumericalError("eigenvalue QR iteration did not converge");
          if (its == 10 || its == 20 || its == 40) {
            t += x;
            for (int i = 0; i <= nn; ++i) at(i, i) -= x;
            s = std::abs(at(nn, nn - 1)) + std::abs(at(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = at(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / at(m + 1, m) + at(m, m + 1);
            q = at(m + 1, m + 1) - z - r - s;
            r = at(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(at(m - 1, m - 1)) + std::abs(z) + std::abs(at(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            at(i, i - 2) = 0.0;
            if (i != m + 2) at(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = at(k, k - 1);
              q = at(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = at(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) at(k, k - 1) = -at(k, k - 1);
              } else {
                at(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = at(k, j) + q * at(k + 1, j);
                if (k != nn - 1) {
                  p += r * at(k + 2, j);
                  at(k + 2, j) -= p * z;
                }
                at(k + 1, j) -= p * y;
                at(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * at(i, k) + y * at(i, k + 1);
                if (k != nn - 1) {
                  p += z * at(i, k + 2);
                  at(i, k + 2) -= p * r;
                }
                at(i, k + 1) -= p * q;
                at(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

// Phase-one simplex for {u >= 1, R u >= 1}. Substituting u = 1 + w gives
// R w - s = 1 - R 1 with w, s >= 0; artificials start in the basis and
// Bland's rule guarantees termination.
inline bool unit_cone_feasible(const Matrix& r) {
  const std::size_t n = r.rows();
  const std::size_t ncols = 3 * n;
  const std::size_t rhs = ncols;
  std::vector<double> t(n * (ncols + 1), 0.0);
  auto cell = [&](std::size_t i, std::size_t j) -> double& { return t[i * (ncols + 1) + j]; };
  std::vector<std::size_t> basis(n);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double b = 1.0;
    for (std::size_t j = 0; j < n; ++j) b -= r(i, j);
    const double sgn = b < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) cell(i, j) = sgn * r(i, j);
    cell(i, n + i) = -sgn;
    cell(i, 2 * n + i) = 1.0;
    cell(i, rhs) = sgn * b;
    basis[i] = 2 * n + i;
    scale = std::max(scale, std::abs(b));
  }
  scale = std::max(scale, r.max_abs());
  std::vector<double> obj(ncols + 1, 0.0);
  for (std::size_t j = 0; j < 2 * n; ++j)
    for (std::size_t i = 0; i < n; ++i) obj[j] -= cell(i, j);
  for (std::size_t i = 0; i < n; ++i) obj[rhs] -= cell(i, rhs);

  const double eps = 1e-12 * scale;
  const std::size_t max_pivots = 200 * (ncols + 1);
  for (std::size_t iter = 0; iter < max_pivots; ++iter) {
    std::size_t enter = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (obj[j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == ncols) break;
    std::size_t leave = n;
    double best = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = cell(i, enter);
      if (a <= eps) continue;
      const double ratio = cell(i, rhs) / a;
      if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < n && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == n) break;  // phase-one objective is bounded below, so this means stalled
    const double pv = cell(leave, enter);
    for (std::size_t j = 0; j <= ncols; ++j) cell(leave, j) /= pv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == leave) continue;
      const double f = cell(i, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) cell(i, j) -= f * cell(leave, j);
    }
    const double f = obj[enter];
    for (std::size_t j = 0; j <= ncols; ++j) obj[j] -= f * cell(leave, j);
    basis[leave] = enter;
  }
  return -obj[rhs] <= 1e-9 * scale;
}

}  // namespace detail

// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
inline SymmetricEigen symmetric_eigen(const Matrix& input) {
  detail::require_square(input, "symmetric_eigen");
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);
  double total = 0.0;
  for (double e : a.entries()) total += e * e;
  for (int sweep = 0;; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-32 * total || off == 0.0) break;
    if (sweep == 100) throw NumericalError("Jacobi eigenvalue iteration did not converge");
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return {a.diag(), std::move(v)};
}

// All eigenvalues of a general real square matrix.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  detail::require_square(m, "eigenvalues");
  if (m.asymmetry() == 0.0) {
    std::vector<std::complex<double>> out;
    for (double v : symmetric_eigen(m).values) out.emplace_back(v, 0.0);
    return out;
  }
  Matrix a = m;
  detail::balance(a);
  detail::to_hessenberg(a);
  return detail::hessenberg_eigenvalues(a);
}

inline double spectral_radius(const Matrix& m) {
  detail::require_square(m, "spectral_radius");
  double rho = 0.0;
  for (const auto& ev : eigenvalues(m)) rho = std::max(rho, std::abs(ev));
  return rho;
}

// True iff some u > 0 has R u > 0.
inline bool is_s_matrix(const Matrix& r) {
  detail::require_square(r, "is_s_matrix");
  return detail::unit_cone_feasible(r);
}

inline bool is_completely_s_matrix(const Matrix& r) {
  detail::require_square(r, "is_completely_s_matrix");
  const std::size_t n = r.rows();
  std::vector<std::size_t> index;
  index.reserve(n);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    index.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) index.push_back(i);
    if (!detail::unit_cone_feasible(r.principal(index))) return false;
  }
  return true;
}

inline bool is_reflection_matrix(const Matrix& r) {
  if (!r.square()) return false;
  for (std::size_t i = 0; i < r.rows(); ++i)
    if (std::abs(r(i, i) - 1.0) > kPivotTolerance) return false;
  return true;
}

inline bool is_z_matrix(const Matrix& r) {
  if (!r.square()) return false;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j)
      if (i != j && r(i, j) > 0.0) return false;
  return true;
}

// Reflection nonsingular M-matrix test via R = I - Q, Q >= 0, rho(Q) < 1.
// Cheaper than classify(); used to validate simulation inputs.
inline bool is_reflection_nonsingular_m(const Matrix& r) {
  detail::require_square(r, "is_reflection_nonsingular_m");
  if (!is_reflection_matrix(r) || !is_z_matrix(r)) return false;
  return spectral_radius(Matrix::identity(r.rows()) - r) < 1.0;
}

inline MatrixClassReport classify(const Matrix& r) {
  detail::require_square(r, "classify");
  const std::size_t n = r.rows();
  MatrixClassReport report;
  report.is_reflection = is_reflection_matrix(r);
  report.is_z = is_z_matrix(r);
  report.is_s = is_s_matrix(r);
  report.is_completely_s = report.is_s && is_completely_s_matrix(r);
  if (report.is_reflection) {
    report.spectral_radius_of_q = spectral_radius(Matrix::identity(n) - r);
  }
  if (report.is_z) {
    // R = s I - Q with s = max diagonal entry keeps Q >= 0.
    double s = r(0, 0);
    for (std::size_t i = 1; i < n; ++i) s = std::max(s, r(i, i));
    if (s > 0.0) {
      const double rho = spectral_radius(s * Matrix::identity(n) - r);
      report.is_nonsingular_m = rho < s;
      report.marginal = std::abs(rho - s) <= kMarginalBand * s;
    }
  }
  return report;
}

inline std::optional<Matrix> inverse(const Matrix& m) {
  detail::require_square(m, "inverse");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < kPivotTolerance) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    const double d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// True iff R is invertible with R^(-1) >= 0 entrywise and a positive diagonal.
inline bool inverse_nonnegativity(const Matrix& r) {
  const auto inv = inverse(r);
  if (!inv) return false;
  const double tol = kPivotTolerance * std::max(1.0, inv->max_abs());
  for (std::size_t i = 0; i < inv->rows(); ++i) {
    for (std::size_t j = 0; j < inv->cols(); ++j) {
      if ((*inv)(i, j) < -tol) return false;
    }
    if ((*inv)(i, i) <= tol) return false;
  }
  return true;
}

inline void require_symmetric(const Matrix& a, const char* what) {
  detail::require_square(a, what);
  if (a.asymmetry() > kSymmetryTolerance) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
  }
}

inline bool is_symmetric_positive_definite(const Matrix& a) {
  if (a.empty() || !a.square() || a.rows() > kMaxDimension) return false;
  if (a.asymmetry() > kSymmetryTolerance) return false;
  const auto eig = symmetric_eigen(a);
  return *std::min_element(eig.values.begin(), eig.values.end()) > 0.0;
}

inline SpdRoots spd_sqrt(const Matrix& a) {
  require_symmetric(a, "spd_sqrt");
  const std::size_t n = a.rows();
  Matrix sym = a;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sym(i, j) = sym(j, i) = 0.5 * (a(i, j) + a(j, i));
  const auto eig = symmetric_eigen(sym);
  for (double lambda : eig.values) {
    if (!(lambda > 0.0)) throw std::invalid_argument("spd_sqrt: matrix is not positive definite");
  }
  Matrix root(n, n), inv_root(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0, si = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double vv = eig.vectors(i, k) * eig.vectors(j, k);
        const double sq = std::sqrt(eig.values[k]);
        s += vv * sq;
        si += vv / sq;
      }
      root(i, j) = root(j, i) = s;
      inv_root(i, j) = inv_root(j, i) = si;
    }
  }
  return {std::move(root), std::move(inv_root)};
}

}  // namespace collide
