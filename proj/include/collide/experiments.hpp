#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "collide/matrix.hpp"
#include "collide/matrix_analysis.hpp"
#include "collide/particle_systems.hpp"
#include "collide/srbm.hpp"
#include "collide/statistics.hpp"

namespace collide {

enum class ExperimentVerdict { pass, fail, inconclusive };

inline std::string_view to_string(ExperimentVerdict v) {
  switch (v) {
    case ExperimentVerdict::pass: return "pass";
    case ExperimentVerdict::fail: return "fail";
    case ExperimentVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

// Exact statistics (targets, counts, test statistics) carry a zero
// half-width; Monte Carlo estimates carry a 95% normal half-width.
struct ExperimentResult {
  std::string name;
  std::map<std::string, double> parameters;
  std::map<std::string, double> estimates;
  std::map<std::string, double> ci_halfwidths;
  ExperimentVerdict verdict = ExperimentVerdict::inconclusive;
  std::size_t trials = 0;
  std::uint64_t seed_base = 0;

  void set(const std::string& key, double value, double halfwidth = 0.0) {
    estimates[key] = value;
    ci_halfwidths[key] = halfwidth;
  }

  friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

inline constexpr double kZ95 = 1.959963984540054;

// Worker count: COLLIDE_THREADS when set, hardware concurrency otherwise;
// never more than the number of jobs.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COLLIDE_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw std::invalid_argument("COLLIDE_THREADS must be a positive integer");
    }
    n = static_cast<std::size_t>(cap);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs fn(0..jobs-1) on a worker pool. Results are stored by job index, so
// the output never depends on scheduling.
template <class Fn>
auto run_trials(std::size_t jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using T = decltype(fn(std::size_t{0}));
  std::vector<std::optional<T>> slots(jobs);
  const std::size_t workers = worker_count(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(jobs);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace detail {

inline std::string keyed(std::string_view base, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return std::string(base) + "@dt=" + buf;
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

inline void require_trials(std::size_t n, const char* what) {
  if (n < 2) throw std::invalid_argument(std::string(what) + " must be at least 2");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// 1-d hitting probability of the origin for drift +b, unit variance.

inline ExperimentResult hitting_probability_experiment(double b, double x, double t_end, double dt,
                                                       std::size_t trials, std::uint64_t seed) {
  detail::require_positive(b, "b");
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("x must be nonnegative");
  detail::require_trials(trials, "trials");
  const Vector times = make_time_grid(t_end, dt);
  const SrbmSpec spec{Matrix{{1.0}}, {b}, Matrix{{1.0}}};
  const Vector x0{x};

  const auto hits = run_trials(trials, [&](std::size_t t) {
    if (x == 0.0) return 1;
    SrbmStepper stepper(spec, x0, seed + t);
    for (std::size_t k = 1; k < times.size(); ++k) {
      stepper.step(times[k] - times[k - 1]);
      if (stepper.state()[0] == 0.0) return 1;
    }
    return 0;
  });

  std::size_t count = 0;
  for (int h : hits) count += static_cast<std::size_t>(h);
  const double p = static_cast<double>(count) / static_cast<double>(trials);
  const double se = stats::binomial_standard_error(p, trials);
  const double target = std::exp(-2.0 * b * x);

  ExperimentResult r;
  r.name = "hitting_probability";
  r.parameters = {{"b", b}, {"x", x}, {"t_end", t_end}, {"dt", dt}, {"allowance", 0.01}};
  r.trials = trials;
  r.seed_base = seed;
  r.set("hit_probability", p, kZ95 * se);
  r.set("target", target);
  r.set("abs_error", std::abs(p - target));
  r.set("tolerance", 3.0 * se + 0.01);
  r.verdict = std::abs(p - target) < 3.0 * se + 0.01 ? ExperimentVerdict::pass : ExperimentVerdict::fail;
  return r;
}

// ---------------------------------------------------------------------------
// Near-triple-collision frequency under mesh refinement.

struct DichotomyConfig {
  ParticleSystemSpec spec;
  std::size_t rank_k = 2;  // 1-based interior rank
  double delta = kDefaultCollisionDelta;
  std::vector<double> dt_list{1e-2, 1e-3, 1e-4};
  double t_end = 1.0;
  std::size_t trials = 10'000;
  std::uint64_t seed = 0;
  double initial_gap = 0.1;  // every gap starts here
  Discretization scheme = Discretization::bridge;
};

inline ExperimentResult dichotomy_experiment(const DichotomyConfig& cfg) {
  const auto prediction = predict_behavior(cfg.spec);
  const std::size_t n = cfg.spec.n();
  if (cfg.rank_k < 2 || cfg.rank_k + 1 > n) {
    throw std::invalid_argument("rank_k must be an interior rank in 2.." + std::to_string(n - 1));
  }
  detail::require_positive(cfg.delta, "delta");
  detail::require_positive(cfg.t_end, "t_end");
  detail::require_positive(cfg.initial_gap, "initial_gap");
  detail::require_trials(cfg.trials, "trials");
  if (cfg.dt_list.empty()) throw std::invalid_argument("dt_list must be nonempty");
  for (std::size_t i = 0; i < cfg.dt_list.size(); ++i) {
    detail::require_positive(cfg.dt_list[i], "dt");
    if (i > 0 && !(cfg.dt_list[i] < cfg.dt_list[i - 1])) throw std::invalid_argument("dt_list must be decreasing");
  }
  const SrbmSpec gap = to_srbm(cfg.spec);
  const Vector x0(gap.dim(), cfg.initial_gap);
  const std::size_t lo = cfg.rank_k - 2, hi = cfg.rank_k - 1;  // adjacent gap indices
  const double half = 0.5 * cfg.delta;
  const bool predicted_hit = !prediction.find(cfg.rank_k, cfg.rank_k)->holds;

  ExperimentResult r;
  r.name = "dichotomy";
  r.parameters = {{"rank_k", static_cast<double>(cfg.rank_k)},
                  {"delta", cfg.delta},
                  {"t_end", cfg.t_end},
                  {"initial_gap", cfg.initial_gap},
                  {"predicted_hit", predicted_hit ? 1.0 : 0.0},
                  {"bridge_scheme", cfg.scheme == Discretization::bridge ? 1.0 : 0.0}};
  r.trials = cfg.trials;
  r.seed_base = cfg.seed;

  std::vector<double> freq, freq_half;
  for (double dt : cfg.dt_list) {
    const Vector times = make_time_grid(cfg.t_end, dt);
    struct Hit {
      bool at_delta = false;
      bool at_half = false;
    };
    const auto hits = run_trials(cfg.trials, [&](std::size_t t) {
      SrbmStepper stepper(gap, x0, cfg.seed + t, cfg.scheme);
      Hit h;
      for (std::size_t k = 1; k < times.size() && !h.at_half; ++k) {
        stepper.step(times[k] - times[k - 1]);
        const double m = std::max(stepper.state()[lo], stepper.state()[hi]);
        h.at_delta = h.at_delta || m < cfg.delta;
        h.at_half = m < half;
      }
      return h;
    });
    std::size_t c = 0, ch = 0;
    for (const auto& h : hits) {
      c += h.at_delta;
      ch += h.at_half;
    }
    const double f = static_cast<double>(c) / static_cast<double>(cfg.trials);
    const double fh = static_cast<double>(ch) / static_cast<double>(cfg.trials);
    freq.push_back(f);
    freq_half.push_back(fh);
    r.set(detail::keyed("frequency", dt), f, kZ95 * stats::binomial_standard_error(f, cfg.trials));
    r.set(detail::keyed("frequency_half_delta", dt), fh, kZ95 * stats::binomial_standard_error(fh, cfg.trials));
  }

  const double f_fine = freq.back();
  if (predicted_hit) {
    const bool monotone = std::is_sorted(freq.begin(), freq.end());
    const double se = stats::binomial_standard_error(f_fine, cfg.trials);
    const bool away = f_fine > 0.0 && f_fine >= 5.0 * se;
    r.set("finest_over_se", se > 0.0 ? f_fine / se : 0.0);
    r.verdict = monotone && away ? ExperimentVerdict::pass : ExperimentVerdict::fail;
  } else {
    const double fh = freq_half.back();
    r.set("finest_half_delta_ratio", f_fine > 0.0 ? fh / f_fine : 0.0);
    if (f_fine == 0.0) {
      r.verdict = ExperimentVerdict::inconclusive;
    } else {
      r.verdict = fh <= 0.5 * f_fine ? ExperimentVerdict::pass : ExperimentVerdict::fail;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Product-form stationarity under skew-symmetry.

struct StationarityConfig {
  SrbmSpec spec;
  double t_burn = 20.0;
  double t_end = 10'020.0;    // per chain
  double dt = 1e-3;
  double sample_spacing = 1.0;
  std::size_t chains = 10;    // independent chains, seeds seed + chain
  std::uint64_t seed = 0;
  Discretization scheme = Discretization::bridge;
  double rank_correlation_limit = 0.05;
};

inline ExperimentResult stationarity_experiment(const StationarityConfig& cfg) {
  const SrbmSpec& spec = cfg.spec;
  spec.validate();
  if (spec.zero_noise) throw std::invalid_argument("stationarity experiment needs a noisy SRBM");
  if (!check_skew_symmetry(spec.r, spec.a)) {
    throw std::invalid_argument("stationarity experiment requires R D + D R' = 2 A");
  }
  const auto r_inv = inverse(spec.r);
  if (!r_inv) throw NumericalError("reflection matrix is singular");
  const Vector drift = *r_inv * spec.mu;
  for (double v : drift) {
    if (!(v < 0.0)) throw std::invalid_argument("stationarity experiment requires R^-1 mu < 0 componentwise");
  }
  detail::require_positive(cfg.dt, "dt");
  detail::require_positive(cfg.sample_spacing, "sample_spacing");
  if (!(cfg.t_burn >= 0.0)) throw std::invalid_argument("t_burn must be nonnegative");
  if (!(cfg.t_end > cfg.t_burn)) throw std::invalid_argument("t_end must exceed t_burn");
  if (cfg.chains < 1) throw std::invalid_argument("chains must be positive");
  const double per = cfg.sample_spacing / cfg.dt;
  const auto steps_per_sample = static_cast<std::size_t>(std::llround(per));
  if (steps_per_sample < 1 || std::abs(per - static_cast<double>(steps_per_sample)) > 1e-9 * per) {
    throw std::invalid_argument("sample_spacing must be a positive multiple of dt");
  }
  const auto burn_steps = static_cast<std::size_t>(std::ceil(cfg.t_burn / cfg.dt - 1e-9));
  const auto samples_per_chain =
      static_cast<std::size_t>(std::floor((cfg.t_end - cfg.t_burn) / cfg.sample_spacing + 1e-9));
  if (samples_per_chain < 2) throw std::invalid_argument("fewer than two samples per chain");
  const std::size_t d = spec.dim();

  const auto chains = run_trials(cfg.chains, [&](std::size_t c) {
    SrbmStepper stepper(spec, Vector(d, 0.0), cfg.seed + c, cfg.scheme);
    for (std::size_t k = 0; k < burn_steps; ++k) stepper.step(cfg.dt);
    std::vector<Vector> out;
    out.reserve(samples_per_chain);
    for (std::size_t s = 0; s < samples_per_chain; ++s) {
      for (std::size_t k = 0; k < steps_per_sample; ++k) stepper.step(cfg.dt);
      out.push_back(stepper.state());
    }
    return out;
  });

  std::vector<Vector> columns(d);
  for (const auto& chain : chains)
    for (const auto& z : chain)
      for (std::size_t i = 0; i < d; ++i) columns[i].push_back(z[i]);
  const std::size_t total = columns.front().size();

  ExperimentResult r;
  r.name = "stationarity";
  r.parameters = {{"t_burn", cfg.t_burn},
                  {"t_end", cfg.t_end},
                  {"dt", cfg.dt},
                  {"sample_spacing", cfg.sample_spacing},
                  {"samples", static_cast<double>(total)},
                  {"ks_critical_1pct", stats::kStephensExponentialCritical1pct},
                  {"rank_correlation_limit", cfg.rank_correlation_limit},
                  {"bridge_scheme", cfg.scheme == Discretization::bridge ? 1.0 : 0.0}};
  r.trials = cfg.chains;
  r.seed_base = cfg.seed;

  bool ok = true;
  for (std::size_t i = 0; i < d; ++i) {
    const std::string idx = std::to_string(i + 1);
    const auto fit = stats::ks_exponential(columns[i]);
    const double se = std::sqrt(stats::variance(columns[i]) / static_cast<double>(total));
    r.set("mean_" + idx, fit.mean, kZ95 * se);
    r.set("ks_modified_" + idx, fit.modified);
    ok = ok && !fit.rejected_1pct;
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double rho = stats::spearman(columns[i], columns[j]);
      r.set("rank_correlation_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), rho,
            kZ95 / std::sqrt(static_cast<double>(total)));
      ok = ok && std::abs(rho) < cfg.rank_correlation_limit;
    }
  }
  r.verdict = ok ? ExperimentVerdict::pass : ExperimentVerdict::fail;
  return r;
}

// ---------------------------------------------------------------------------
// Pathwise comparison of Skorohod maps on a shared driver. Lowering the
// off-diagonal reflection entries pushes harder toward the faces, so the
// path reflected with r_bar <= r is the smaller one: Z(r_bar) <= Z(r).
// Each coordinate subset I solved with [R]_I alone bounds [Z(r)]_I from
// above.

struct ComparisonConfig {
  Matrix r;
  Matrix r_bar;
  Vector mu;
  Matrix a;
  Vector x0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::size_t seeds = 100;
  std::uint64_t seed = 0;
};

inline constexpr double kComparisonTolerance = 1e-9;

// Proper coordinate subsets of size one or two, 0-based.
inline std::vector<std::vector<std::size_t>> comparison_subsets(std::size_t d) {
  std::vector<std::vector<std::size_t>> out;
  if (d < 2) return out;
  for (std::size_t i = 0; i < d; ++i) out.push_back({i});
  if (d > 2)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) out.push_back({i, j});
  return out;
}

inline ExperimentResult comparison_experiment(const ComparisonConfig& cfg) {
  const SrbmSpec spec{cfg.r, cfg.mu, cfg.a};
  spec.validate();
  const std::size_t d = spec.dim();
  if (cfg.r_bar.rows() != d || cfg.r_bar.cols() != d) throw std::invalid_argument("r_bar dimension mismatch");
  if (!is_reflection_nonsingular_m(cfg.r_bar)) {
    throw std::invalid_argument("r_bar must be a reflection nonsingular M-matrix");
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (cfg.r_bar(i, j) > cfg.r(i, j)) throw std::invalid_argument("r_bar must not exceed r entrywise");
  if (cfg.x0.size() != d) throw std::invalid_argument("x0 dimension mismatch");
  for (double v : cfg.x0)
    if (!(v >= 0.0)) throw std::invalid_argument("x0 must lie in the orthant");
  if (cfg.seeds < 1) throw std::invalid_argument("seeds must be positive");
  const Vector times = make_time_grid(cfg.t_end, cfg.dt);
  const auto subsets = comparison_subsets(d);

  struct Outcome {
    double max_excess = -INFINITY;
    std::size_t violations = 0;
    double projection_max_excess = -INFINITY;
    std::size_t projection_violations = 0;
  };
  const auto outcomes = run_trials(cfg.seeds, [&](std::size_t s) {
    GaussianDriver gen(spec, cfg.seed + s);
    std::vector<Vector> x;
    x.reserve(times.size());
    x.push_back(cfg.x0);
    Vector dx(d);
    for (std::size_t k = 1; k < times.size(); ++k) {
      gen.next(times[k] - times[k - 1], dx);
      Vector next = x.back();
      for (std::size_t i = 0; i < d; ++i) next[i] += dx[i];
      x.push_back(std::move(next));
    }
    const auto z = skorohod_map(times, x, cfg.r);
    const auto z_bar = skorohod_map(times, x, cfg.r_bar);
    Outcome o;
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        const double e = z_bar.states[k][i] - z.states[k][i];
        o.max_excess = std::max(o.max_excess, e);
        if (e > kComparisonTolerance) ++o.violations;
      }
    }
    for (const auto& idx : subsets) {
      const Matrix r_sub = cfg.r.principal(idx);
      std::vector<Vector> x_sub(times.size(), Vector(idx.size()));
      for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t a = 0; a < idx.size(); ++a) x_sub[k][a] = x[k][idx[a]];
      const auto z_sub = skorohod_map(times, x_sub, r_sub);
      for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t a = 0; a < idx.size(); ++a) {
          const double e = z.states[k][idx[a]] - z_sub.states[k][a];
          o.projection_max_excess = std::max(o.projection_max_excess, e);
          if (e > kComparisonTolerance) ++o.projection_violations;
        }
      }
    }
    return o;
  });

  Outcome total;
  for (const auto& o : outcomes) {
    total.max_excess = std::max(total.max_excess, o.max_excess);
    total.violations += o.violations;
    total.projection_max_excess = std::max(total.projection_max_excess, o.projection_max_excess);
    total.projection_violations += o.projection_violations;
  }
  ExperimentResult r;
  r.name = "comparison";
  r.parameters = {{"dimension", static_cast<double>(d)},
                  {"t_end", cfg.t_end},
                  {"dt", cfg.dt},
                  {"tolerance", kComparisonTolerance},
                  {"subsets", static_cast<double>(subsets.size())}};
  r.trials = cfg.seeds;
  r.seed_base = cfg.seed;
  r.set("max_excess", total.max_excess);
  r.set("violations", static_cast<double>(total.violations));
  if (!subsets.empty()) {
    r.set("projection_max_excess", total.projection_max_excess);
    r.set("projection_violations", static_cast<double>(total.projection_violations));
  }
  r.verdict = total.violations == 0 && total.projection_violations == 0 ? ExperimentVerdict::pass
                                                                        : ExperimentVerdict::fail;
  return r;
}

// ---------------------------------------------------------------------------
// Gap law of the named Euler scheme against the SRBM route.

struct GapEquivalenceConfig {
  ParticleSystemSpec spec;
  Vector x0;  // named initial positions
  double t_check = 1.0;
  double dt = 1e-3;
  std::size_t trials = 20'000;  // per route
  std::uint64_t seed = 0;
  Discretization scheme = Discretization::bridge;  // SRBM route
};

inline ExperimentResult gap_equivalence_experiment(const GapEquivalenceConfig& cfg) {
  cfg.spec.validate();
  if (!cfg.spec.is_classical()) throw std::invalid_argument("gap equivalence requires q_plus = q_minus = 1/2");
  if (cfg.x0.size() != cfg.spec.n()) throw std::invalid_argument("x0 must hold one position per particle");
  detail::require_positive(cfg.t_check, "t_check");
  detail::require_trials(cfg.trials, "trials");
  const SrbmSpec gap = to_srbm(cfg.spec);
  const std::size_t d = gap.dim();
  const Vector times = make_time_grid(cfg.t_check, cfg.dt);
  Vector sorted = cfg.x0;
  std::sort(sorted.begin(), sorted.end());
  Vector z0(d);
  for (std::size_t k = 0; k < d; ++k) z0[k] = sorted[k + 1] - sorted[k];

  const auto named = run_trials(cfg.trials, [&](std::size_t t) {
    NamedStepper stepper(cfg.spec, cfg.x0, cfg.seed + t);
    for (std::size_t k = 1; k < times.size(); ++k) stepper.step(times[k] - times[k - 1]);
    Vector y = stepper.positions();
    std::sort(y.begin(), y.end());
    Vector z(d);
    for (std::size_t k = 0; k < d; ++k) z[k] = y[k + 1] - y[k];
    return z;
  });
  const auto srbm = run_trials(cfg.trials, [&](std::size_t t) {
    SrbmStepper stepper(gap, z0, cfg.seed + cfg.trials + t, cfg.scheme);
    for (std::size_t k = 1; k < times.size(); ++k) stepper.step(times[k] - times[k - 1]);
    return stepper.state();
  });
  const auto mn = stats::sample_moments(named);
  const auto ms = stats::sample_moments(srbm);

  ExperimentResult r;
  r.name = "gap_equivalence";
  r.parameters = {{"n", static_cast<double>(cfg.spec.n())},
                  {"t_check", cfg.t_check},
                  {"dt", cfg.dt},
                  {"pooled_se_multiple", 4.0},
                  {"bridge_scheme", cfg.scheme == Discretization::bridge ? 1.0 : 0.0}};
  r.trials = cfg.trials;
  r.seed_base = cfg.seed;
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const std::string idx = std::to_string(i + 1);
    r.set("named_mean_" + idx, mn.mean[i], kZ95 * mn.mean_se[i]);
    r.set("srbm_mean_" + idx, ms.mean[i], kZ95 * ms.mean_se[i]);
    const double pooled = std::hypot(mn.mean_se[i], ms.mean_se[i]);
    r.set("mean_z_" + idx, (mn.mean[i] - ms.mean[i]) / pooled);
    worst = std::max(worst, std::abs(mn.mean[i] - ms.mean[i]) / pooled);
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      const std::string idx = std::to_string(i + 1) + "_" + std::to_string(j + 1);
      r.set("named_cov_" + idx, mn.cov(i, j), kZ95 * mn.cov_se(i, j));
      r.set("srbm_cov_" + idx, ms.cov(i, j), kZ95 * ms.cov_se(i, j));
      const double pooled = std::hypot(mn.cov_se(i, j), ms.cov_se(i, j));
      r.set("cov_z_" + idx, (mn.cov(i, j) - ms.cov(i, j)) / pooled);
      worst = std::max(worst, std::abs(mn.cov(i, j) - ms.cov(i, j)) / pooled);
    }
  }
  r.set("max_abs_z", worst);
  r.verdict = worst < 4.0 ? ExperimentVerdict::pass : ExperimentVerdict::fail;
  return r;
}

}  // namespace collide
