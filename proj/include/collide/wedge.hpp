#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "collide/matrix.hpp"
#include "collide/matrix_analysis.hpp"
#include "collide/particle_systems.hpp"
#include "collide/srbm.hpp"

namespace collide {

inline constexpr double kCornerBand = 1e-9;

using Vec2 = std::array<double, 2>;

// Geometry of a planar SRBM after the map z -> A^(-1/2) z: a wedge of angle
// xi with reflection angles theta1, theta2 (positive toward the corner).
struct WedgeGeometry {
  double xi = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  Vec2 n1{}, n2{};  // inward unit normals
  Vec2 v1{}, v2{};  // reflection directions, normalized so v_i . n_i = 1
  bool hits_corner = false;
  // |theta1 + theta2| <= kCornerBand; hits_corner is then reported false.
  bool marginal = false;
};

// Normals n_i = a_ii^(-1/2) A^(1/2) e_i and reflection vectors
// v_i = a_ii^(1/2) A^(-1/2) R e_i, returned as matrix columns.
struct FaceVectors {
  Matrix normals;
  Matrix reflections;
};

inline FaceVectors face_vectors(const Matrix& r, const Matrix& a) {
  detail::require_srbm_pair(r, a, "face_vectors");
  const auto roots = spd_sqrt(a);
  const Matrix reflected = roots.inverse_root * r;
  const std::size_t d = r.rows();
  FaceVectors out{Matrix(d, d), Matrix(d, d)};
  for (std::size_t i = 0; i < d; ++i) {
    const double sa = std::sqrt(a(i, i));
    for (std::size_t k = 0; k < d; ++k) {
      out.normals(k, i) = roots.root(k, i) / sa;
      out.reflections(k, i) = reflected(k, i) * sa;
    }
  }
  return out;
}

inline WedgeGeometry wedge_geometry(const Matrix& r, const Matrix& a) {
  detail::require_srbm_pair(r, a, "wedge_geometry");
  if (r.rows() != 2) throw std::invalid_argument("wedge_geometry: dimension must be 2");
  const double a11 = a(0, 0), a12 = a(0, 1), a22 = a(1, 1);
  const double r12 = r(0, 1), r21 = r(1, 0);

  WedgeGeometry g;
  g.xi = std::acos(std::clamp(-a12 / std::sqrt(a11 * a22), -1.0, 1.0));
  const double s1 = (a12 - a11 * r21) / std::sqrt(a11 * (a11 * r21 * r21 - 2.0 * a12 * r21 + a22));
  const double s2 = (a12 - a22 * r12) / std::sqrt(a22 * (a22 * r12 * r12 - 2.0 * a12 * r12 + a11));
  g.theta1 = std::asin(std::clamp(s1, -1.0, 1.0));
  g.theta2 = std::asin(std::clamp(s2, -1.0, 1.0));

  const auto faces = face_vectors(r, a);
  g.n1 = {faces.normals(0, 0), faces.normals(1, 0)};
  g.n2 = {faces.normals(0, 1), faces.normals(1, 1)};
  g.v1 = {faces.reflections(0, 0), faces.reflections(1, 0)};
  g.v2 = {faces.reflections(0, 1), faces.reflections(1, 1)};

  const double sum = g.theta1 + g.theta2;
  g.marginal = std::abs(sum) <= kCornerBand;
  g.hits_corner = !g.marginal && sum > 0.0;
  return g;
}

// Maps states (and the driver, when present) by A^(-1/2); regulators are
// unchanged.
inline SimulatedPath transform_path(const SimulatedPath& path, const Matrix& a) {
  if (path.dim() != 2 || a.rows() != 2 || a.cols() != 2) {
    throw std::invalid_argument("transform_path: path and covariance must be two-dimensional");
  }
  const Matrix inv_root = spd_sqrt(a).inverse_root;
  SimulatedPath out = path;
  for (auto& z : out.states) z = inv_root * z;
  if (out.driver) {
    for (auto& x : *out.driver) x = inv_root * x;
  }
  return out;
}

inline double min_distance_to_origin(const SimulatedPath& path) {
  double best = INFINITY;
  for (const auto& z : path.states) best = std::min(best, std::sqrt(dot(z, z)));
  return best;
}

// n_i . q_j + n_j . q_i = 0 for all i, j with q_i = v_i - n_i.
inline bool skew_symmetry_transfer_check(const Matrix& r, const Matrix& a) {
  const auto faces = face_vectors(r, a);
  const std::size_t d = r.rows();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double niqj = 0.0, njqi = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        niqj += faces.normals(k, i) * (faces.reflections(k, j) - faces.normals(k, j));
        njqi += faces.normals(k, j) * (faces.reflections(k, i) - faces.normals(k, i));
      }
      if (std::abs(niqj + njqi) >= kSkewSymmetryTolerance) return false;
    }
  }
  return true;
}

}  // namespace collide
