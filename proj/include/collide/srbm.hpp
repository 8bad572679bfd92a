#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "collide/matrix.hpp"
#include "collide/matrix_analysis.hpp"
#include "collide/particle_systems.hpp"
#include "collide/srbm_spec.hpp"

namespace collide {

inline constexpr double kSkorohodChangeTolerance = 1e-12;
inline constexpr std::size_t kSkorohodIterationCap = 10'000;
inline constexpr double kDefaultCollisionDelta = 1e-3;

// How a grid step turns a Gaussian driver increment into a new state.
//   projected: Skorohod step on z + dx (the discrete Skorohod problem; states
//              land exactly on faces and complementarity holds per step).
//   bridge:    Skorohod step on z + m, where m_i is the minimum of the i-th
//              driver component over the step sampled from its Brownian
//              bridge; the state is then z + dx + R dy. Exact in one
//              dimension, states stay off the faces, and the push may occur
//              while the grid state is interior.
enum class Discretization { projected, bridge };

inline std::string_view to_string(Discretization scheme) {
  return scheme == Discretization::bridge ? "bridge" : "projected";
}

inline Discretization parse_discretization(std::string_view name) {
  if (name == "projected") return Discretization::projected;
  if (name == "bridge") return Discretization::bridge;
  throw std::invalid_argument("unknown discretization '" + std::string(name) + "'");
}

// Grid 0 = t_0 < t_1 < ... < t_n = t_end with t_k = k * dt (last step may be
// shorter).
inline Vector make_time_grid(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  if (dt > t_end * (1.0 + 1e-12)) throw std::invalid_argument("dt must not exceed t_end");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  Vector times(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) times[k] = static_cast<double>(k) * dt;
  times[steps] = t_end;
  return times;
}

// Solves the orthant linear complementarity problem
//   w = q + R dy >= 0,  dy >= 0,  w . dy = 0
// for a reflection nonsingular M-matrix R. The monotone fixed point
// dy <- max(0, Q dy - q), Q = I - R, starts from zero; whenever its support
// grows the candidate active set is solved exactly and accepted if it is
// complementary.
class SkorohodSolver {
 public:
  explicit SkorohodSolver(const Matrix& r) : r_(r), d_(r.rows()) {
    if (!is_reflection_nonsingular_m(r)) {
      throw std::invalid_argument("reflection matrix must be a reflection nonsingular M-matrix");
    }
    next_.resize(d_);
    active_.assign(d_, 0);
    index_.resize(d_);
    sub_.resize(d_ * d_);
    rhs_.resize(d_);
  }

  std::size_t dim() const { return d_; }
  const Matrix& reflection() const { return r_; }
  std::size_t last_iterations() const { return iterations_; }

  void solve(std::span<const double> q, std::span<double> dy, std::span<double> w) {
    iterations_ = 0;
    if (std::all_of(q.begin(), q.end(), [](double v) { return v >= 0.0; })) {
      std::fill(dy.begin(), dy.end(), 0.0);
      std::copy(q.begin(), q.end(), w.begin());
      return;
    }
    double scale = 1.0;
    for (double v : q) scale = std::max(scale, std::abs(v));
    std::fill(dy.begin(), dy.end(), 0.0);
    std::fill(active_.begin(), active_.end(), 0);
    double change = 0.0;
    for (std::size_t it = 1; it <= kSkorohodIterationCap; ++it) {
      iterations_ = it;
      change = 0.0;
      bool grew = false;
      for (std::size_t i = 0; i < d_; ++i) {
        // (Q dy)_i with Q = I - R and r_ii = 1.
        double s = -q[i];
        for (std::size_t j = 0; j < d_; ++j)
          if (j != i) s -= r_(i, j) * dy[j];
        const double v = std::max(0.0, s);
        change = std::max(change, std::abs(v - dy[i]));
        next_[i] = v;
        if (v > 0.0 && !active_[i]) {
          active_[i] = 1;
          grew = true;
        }
      }
      std::copy(next_.begin(), next_.end(), dy.begin());
      if (grew && polish(q, dy, w, scale)) return;
      if (change < kSkorohodChangeTolerance) {
        for (std::size_t i = 0; i < d_; ++i) {
          double s = q[i];
          for (std::size_t j = 0; j < d_; ++j) s += r_(i, j) * dy[j];
          w[i] = dy[i] > 0.0 ? 0.0 : std::max(0.0, s);
        }
        return;
      }
    }
    throw NumericalError("Skorohod step exceeded " + std::to_string(kSkorohodIterationCap) +
                         " iterations (residual " + std::to_string(change) + ")");
  }

 private:
  // Exact solve on the current support; true if the result is complementary.
  bool polish(std::span<const double> q, std::span<double> dy, std::span<double> w, double scale) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < d_; ++i)
      if (active_[i]) index_[m++] = i;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) sub_[a * m + b] = r_(index_[a], index_[b]);
      rhs_[a] = -q[index_[a]];
    }
    // Gaussian elimination with partial pivoting on the m x m block.
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (std::abs(sub_[r * m + col]) > std::abs(sub_[piv * m + col])) piv = r;
      if (std::abs(sub_[piv * m + col]) < kPivotTolerance) return false;
      if (piv != col) {
        for (std::size_t j = 0; j < m; ++j) std::swap(sub_[piv * m + j], sub_[col * m + j]);
        std::swap(rhs_[piv], rhs_[col]);
      }
      for (std::size_t r = col + 1; r < m; ++r) {
        const double f = sub_[r * m + col] / sub_[col * m + col];
        if (f == 0.0) continue;
        for (std::size_t j = col; j < m; ++j) sub_[r * m + j] -= f * sub_[col * m + j];
        rhs_[r] -= f * rhs_[col];
      }
    }
    for (std::size_t a = m; a-- > 0;) {
      double s = rhs_[a];
      for (std::size_t b = a + 1; b < m; ++b) s -= sub_[a * m + b] * rhs_[b];
      rhs_[a] = s / sub_[a * m + a];
    }
    const double tol = 1e-12 * scale;
    for (std::size_t a = 0; a < m; ++a)
      if (rhs_[a] < -tol) return false;
    for (std::size_t i = 0; i < d_; ++i) {
      if (active_[i]) continue;
      double s = q[i];
      for (std::size_t a = 0; a < m; ++a) s += r_(i, index_[a]) * std::max(0.0, rhs_[a]);
      if (s < -tol) return false;
      next_[i] = s;
    }
    for (std::size_t i = 0; i < d_; ++i) {
      dy[i] = 0.0;
      w[i] = active_[i] ? 0.0 : std::max(0.0, next_[i]);
    }
    for (std::size_t a = 0; a < m; ++a) dy[index_[a]] = std::max(0.0, rhs_[a]);
    return true;
  }

  Matrix r_;
  std::size_t d_;
  std::size_t iterations_ = 0;
  Vector next_;
  std::vector<char> active_;
  std::vector<std::size_t> index_;
  Vector sub_;
  Vector rhs_;
};

struct SkorohodStep {
  Vector z_next;
  Vector dy;
};

// One step of the discrete Skorohod problem: z_next = z + dx + R dy.
inline SkorohodStep skorohod_step(std::span<const double> z, std::span<const double> dx, const Matrix& r) {
  if (z.size() != r.rows() || dx.size() != r.rows()) {
    throw std::invalid_argument("skorohod_step: dimension mismatch");
  }
  for (double v : z) {
    if (!(v >= 0.0)) throw std::invalid_argument("skorohod_step: z must be nonnegative");
  }
  SkorohodSolver solver(r);
  Vector q(z.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = z[i] + dx[i];
  SkorohodStep out{Vector(z.size()), Vector(z.size())};
  solver.solve(q, out.dy, out.z_next);
  return out;
}

// Z values (states), cumulative regulators Y and optionally the driver X
// on a common time grid.
struct SimulatedPath {
  Vector times;
  std::vector<Vector> states;
  std::vector<Vector> regulators;
  std::optional<std::vector<Vector>> driver;

  std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
  std::size_t size() const { return times.size(); }
};

inline SimulatedPath skorohod_map(std::span<const double> times, std::span<const Vector> driver, const Matrix& r) {
  if (times.size() != driver.size() || times.empty()) {
    throw std::invalid_argument("skorohod_map: times and driver must be nonempty and of equal length");
  }
  const std::size_t d = r.rows();
  for (const auto& x : driver) {
    if (x.size() != d) throw std::invalid_argument("skorohod_map: driver dimension mismatch");
  }
  for (double v : driver.front()) {
    if (!(v >= 0.0)) throw std::invalid_argument("skorohod_map: driver must start in the orthant");
  }
  SkorohodSolver solver(r);
  SimulatedPath path;
  path.times.assign(times.begin(), times.end());
  path.states.reserve(times.size());
  path.regulators.reserve(times.size());
  path.states.push_back(driver.front());
  path.regulators.emplace_back(d, 0.0);
  path.driver = std::vector<Vector>(driver.begin(), driver.end());
  Vector q(d), dy(d), w(d);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const Vector& z = path.states.back();
    for (std::size_t i = 0; i < d; ++i) q[i] = z[i] + (driver[k][i] - driver[k - 1][i]);
    solver.solve(q, dy, w);
    Vector y = path.regulators.back();
    for (std::size_t i = 0; i < d; ++i) y[i] += dy[i];
    path.states.push_back(w);
    path.regulators.push_back(std::move(y));
  }
  return path;
}

// Gaussian driver increments with mean mu h and covariance A h, drawn as
// A^(1/2) sqrt(h) xi from an owned per-run stream.
class GaussianDriver {
 public:
  GaussianDriver(const SrbmSpec& spec, std::uint64_t seed)
      : mu_(spec.mu), rng_(seed), xi_(spec.dim()), zero_noise_(spec.zero_noise) {
    if (!zero_noise_) {
      root_ = spd_sqrt(spec.a).root;
      variance_ = spec.a.diag();
    }
  }

  std::size_t dim() const { return mu_.size(); }

  void next(double h, std::span<double> dx) {
    const std::size_t d = mu_.size();
    if (zero_noise_) {
      for (std::size_t i = 0; i < d; ++i) dx[i] = mu_[i] * h;
      return;
    }
    for (std::size_t i = 0; i < d; ++i) xi_[i] = normal_(rng_);
    const double sh = std::sqrt(h);
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += root_(i, j) * xi_[j];
      dx[i] = mu_[i] * h + sh * s;
    }
  }

  // Per-component minimum over the step of the Brownian bridge from 0 to
  // dx_i with variance a_ii h.
  void bridge_minima(double h, std::span<const double> dx, std::span<double> m) {
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (zero_noise_) {
        m[i] = std::min(0.0, dx[i]);
        continue;
      }
      const double u = 1.0 - uniform_(rng_);  // (0, 1]
      m[i] = 0.5 * (dx[i] - std::sqrt(dx[i] * dx[i] - 2.0 * variance_[i] * h * std::log(u)));
    }
  }

 private:
  Vector mu_;
  Matrix root_;
  Vector variance_;
  std::mt19937_64 rng_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
  Vector xi_;
  bool zero_noise_;
};

// Streaming SRBM simulation: Gaussian increments followed by one Skorohod
// step per grid interval.
class SrbmStepper {
 public:
  SrbmStepper(const SrbmSpec& spec, std::span<const double> x0, std::uint64_t seed,
              Discretization scheme = Discretization::projected)
      : driver_((spec.validate(), spec), seed), solver_(spec.r), scheme_(scheme), z_(x0.begin(), x0.end()) {
    const std::size_t d = spec.dim();
    if (x0.size() != d) throw std::invalid_argument("initial state dimension mismatch");
    for (double v : x0) {
      if (!(v >= 0.0)) throw std::invalid_argument("initial state must lie in the orthant");
    }
    y_.assign(d, 0.0);
    dx_.assign(d, 0.0);
    dy_.assign(d, 0.0);
    q_.assign(d, 0.0);
    w_.assign(d, 0.0);
  }

  void step(double h) {
    driver_.next(h, dx_);
    const std::size_t d = z_.size();
    if (scheme_ == Discretization::projected) {
      for (std::size_t i = 0; i < d; ++i) q_[i] = z_[i] + dx_[i];
      solver_.solve(q_, dy_, z_);
    } else {
      driver_.bridge_minima(h, dx_, q_);
      for (std::size_t i = 0; i < d; ++i) q_[i] += z_[i];
      solver_.solve(q_, dy_, w_);
      const Matrix& r = solver_.reflection();
      for (std::size_t i = 0; i < d; ++i) {
        double push = 0.0;
        for (std::size_t j = 0; j < d; ++j) push += r(i, j) * dy_[j];
        z_[i] = std::max(0.0, z_[i] + dx_[i] + push);
      }
    }
    for (std::size_t i = 0; i < d; ++i) y_[i] += dy_[i];
  }

  const Vector& state() const { return z_; }
  const Vector& regulator() const { return y_; }
  const Vector& last_increment() const { return dx_; }
  const Vector& last_push() const { return dy_; }

 private:
  GaussianDriver driver_;
  SkorohodSolver solver_;
  Discretization scheme_;
  Vector z_, y_, dx_, dy_, q_, w_;
};

inline SimulatedPath simulate_srbm(const SrbmSpec& spec, std::span<const double> x0, double t_end, double dt,
                                   std::uint64_t seed, Discretization scheme = Discretization::projected) {
  const Vector times = make_time_grid(t_end, dt);
  SrbmStepper stepper(spec, x0, seed, scheme);
  SimulatedPath path;
  path.times = times;
  path.states.reserve(times.size());
  path.regulators.reserve(times.size());
  std::vector<Vector> driver;
  driver.reserve(times.size());
  path.states.push_back(stepper.state());
  path.regulators.push_back(stepper.regulator());
  driver.emplace_back(x0.begin(), x0.end());
  for (std::size_t k = 1; k < times.size(); ++k) {
    stepper.step(times[k] - times[k - 1]);
    Vector x = driver.back();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += stepper.last_increment()[i];
    driver.push_back(std::move(x));
    path.states.push_back(stepper.state());
    path.regulators.push_back(stepper.regulator());
  }
  path.driver = std::move(driver);
  return path;
}

// Named positions X_i with the ranking permutation at each grid time.
struct NamedPath {
  Vector times;
  std::vector<Vector> positions;
  std::vector<RankingPermutation> rank_history;
};

// Euler scheme for the classical named dynamics: the particle currently
// ranked k moves with drift g_k and diffusion sigma_k.
class NamedStepper {
 public:
  NamedStepper(const ParticleSystemSpec& spec, std::span<const double> x0, std::uint64_t seed,
               bool zero_noise = false)
      : drifts_(spec.drifts), rng_(seed), x_(x0.begin(), x0.end()), zero_noise_(zero_noise) {
    spec.validate();
    if (!spec.is_classical()) {
      throw std::invalid_argument("named simulation requires q_plus = q_minus = 1/2");
    }
    if (x0.size() != spec.n()) throw std::invalid_argument("initial positions dimension mismatch");
    for (double v : x0) {
      if (!std::isfinite(v)) throw std::invalid_argument("initial positions must be finite");
    }
    sigma_.resize(spec.n());
    for (std::size_t k = 0; k < spec.n(); ++k) sigma_[k] = std::sqrt(spec.sigma2[k]);
    ranks_.resize(spec.n());
    xi_.resize(spec.n());
  }

  void step(double h) {
    ranking_permutation(x_, ranks_);
    const double sh = std::sqrt(h);
    for (std::size_t i = 0; i < x_.size(); ++i) xi_[i] = zero_noise_ ? 0.0 : normal_(rng_);
    for (std::size_t k = 0; k < ranks_.size(); ++k) {
      const std::size_t name = ranks_[k];
      x_[name] += drifts_[k] * h + sigma_[k] * sh * xi_[name];
    }
  }

  const Vector& positions() const { return x_; }

 private:
  Vector drifts_;
  Vector sigma_;
  std::mt19937_64 rng_;
  boost::random::normal_distribution<double> normal_;
  Vector x_;
  std::vector<std::size_t> ranks_;
  Vector xi_;
  bool zero_noise_;
};

inline NamedPath simulate_named(const ParticleSystemSpec& spec, std::span<const double> x0, double t_end,
                                double dt, std::uint64_t seed, bool zero_noise = false) {
  const Vector times = make_time_grid(t_end, dt);
  NamedStepper stepper(spec, x0, seed, zero_noise);
  NamedPath path;
  path.times = times;
  path.positions.reserve(times.size());
  path.rank_history.reserve(times.size());
  path.positions.push_back(stepper.positions());
  path.rank_history.push_back(ranking_permutation(stepper.positions()));
  for (std::size_t k = 1; k < times.size(); ++k) {
    stepper.step(times[k] - times[k - 1]);
    path.positions.push_back(stepper.positions());
    path.rank_history.push_back(ranking_permutation(stepper.positions()));
  }
  return path;
}

// Ranked particles Y_1 <= ... <= Y_N driven by independent B_k, with the
// collision local time L_(k,k+1) taken from the k-th regulator of the gap
// process.
class RankedStepper {
 public:
  RankedStepper(const ParticleSystemSpec& spec, std::span<const double> y0, std::uint64_t seed,
                bool zero_noise = false)
      : spec_(spec), solver_(to_srbm(spec).r), rng_(seed), y_(y0.begin(), y0.end()), zero_noise_(zero_noise) {
    const std::size_t n = spec.n();
    if (y0.size() != n) throw std::invalid_argument("initial ranked positions dimension mismatch");
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(y0[k])) throw std::invalid_argument("initial positions must be finite");
      if (k > 0 && y0[k] < y0[k - 1]) throw std::invalid_argument("initial ranked positions must be nondecreasing");
    }
    sigma_.resize(n);
    for (std::size_t k = 0; k < n; ++k) sigma_[k] = std::sqrt(spec.sigma2[k]);
    db_.resize(n);
    z_.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) z_[k] = y0[k + 1] - y0[k];
    l_.assign(n - 1, 0.0);
    dx_.assign(n - 1, 0.0);
    dl_.assign(n - 1, 0.0);
    q_.assign(n - 1, 0.0);
  }

  void step(double h) {
    const std::size_t n = y_.size();
    const double sh = std::sqrt(h);
    for (std::size_t k = 0; k < n; ++k) db_[k] = zero_noise_ ? 0.0 : sh * normal_(rng_);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      dx_[k] = (spec_.drifts[k + 1] - spec_.drifts[k]) * h + sigma_[k + 1] * db_[k + 1] - sigma_[k] * db_[k];
      q_[k] = z_[k] + dx_[k];
    }
    solver_.solve(q_, dl_, z_);
    for (std::size_t k = 0; k + 1 < n; ++k) l_[k] += dl_[k];
    for (std::size_t k = 0; k < n; ++k) {
      double inc = spec_.drifts[k] * h + sigma_[k] * db_[k];
      if (k > 0) inc += spec_.q_plus[k] * dl_[k - 1];
      if (k + 1 < n) inc -= spec_.q_minus[k] * dl_[k];
      y_[k] += inc;
    }
    // Roundoff clamp: the integrated positions match the gap states to
    // about 1e-13, so exact ties may come out a few ulps out of order.
    for (std::size_t k = 1; k < n; ++k) y_[k] = std::max(y_[k], y_[k - 1]);
  }

  const Vector& positions() const { return y_; }
  const Vector& gaps() const { return z_; }
  const Vector& local_times() const { return l_; }
  const Vector& last_gap_increment() const { return dx_; }

 private:
  ParticleSystemSpec spec_;
  SkorohodSolver solver_;
  std::mt19937_64 rng_;
  boost::random::normal_distribution<double> normal_;
  Vector sigma_;
  Vector y_, db_, z_, l_, dx_, dl_, q_;
  bool zero_noise_;
};

struct RankedPath {
  Vector times;
  std::vector<Vector> positions;
};

struct RankedSimulation {
  RankedPath ranked;
  SimulatedPath gaps;
};

inline RankedSimulation simulate_ranked(const ParticleSystemSpec& spec, std::span<const double> y0, double t_end,
                                        double dt, std::uint64_t seed, bool zero_noise = false) {
  const Vector times = make_time_grid(t_end, dt);
  RankedStepper stepper(spec, y0, seed, zero_noise);
  RankedSimulation out;
  out.ranked.times = times;
  out.gaps.times = times;
  std::vector<Vector> driver;
  driver.reserve(times.size());
  out.ranked.positions.push_back(stepper.positions());
  out.gaps.states.push_back(stepper.gaps());
  out.gaps.regulators.push_back(stepper.local_times());
  driver.push_back(stepper.gaps());
  for (std::size_t k = 1; k < times.size(); ++k) {
    stepper.step(times[k] - times[k - 1]);
    Vector x = driver.back();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += stepper.last_gap_increment()[i];
    driver.push_back(std::move(x));
    out.ranked.positions.push_back(stepper.positions());
    out.gaps.states.push_back(stepper.gaps());
    out.gaps.regulators.push_back(stepper.local_times());
  }
  out.gaps.driver = std::move(driver);
  return out;
}

// Near-collision statistics of a gap path. Pair (i, j) is 1-based with
// i < j; near_triple_count[k - 2] belongs to interior rank k = 2..d.
struct CollisionReport {
  struct PairStat {
    std::size_t i = 0;
    std::size_t j = 0;
    double min_max = 0.0;  // min over the grid of max(Z_i, Z_j)
  };

  double delta = kDefaultCollisionDelta;
  std::vector<PairStat> pairs;
  std::vector<std::size_t> near_triple_count;
  std::vector<std::size_t> near_simultaneous_count;  // aligned with `pairs`
};

inline CollisionReport detect_collisions(const SimulatedPath& path, double delta = kDefaultCollisionDelta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  CollisionReport report;
  report.delta = delta;
  const std::size_t d = path.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) report.pairs.push_back({i + 1, j + 1, INFINITY});
  report.near_triple_count.assign(d > 1 ? d - 1 : 0, 0);
  report.near_simultaneous_count.assign(report.pairs.size(), 0);
  for (const auto& z : path.states) {
    std::size_t p = 0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j, ++p) {
        auto& stat = report.pairs[p];
        stat.min_max = std::min(stat.min_max, std::max(z[i], z[j]));
        if (z[i] < delta && z[j] < delta) ++report.near_simultaneous_count[p];
      }
    }
    for (std::size_t k = 1; k < d; ++k)
      if (z[k - 1] < delta && z[k] < delta) ++report.near_triple_count[k - 1];
  }
  return report;
}

}  // namespace collide
