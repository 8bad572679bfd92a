#pragma once

#include <filesystem>
#include <sstream>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collide/collide.hpp"
#include "collide/io.hpp"

namespace collide::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + file.string() + "'");
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p)) {
    throw ConfigError("output directory '" + dir + "' is not writable");
  }
  return p;
}

inline std::vector<std::size_t> failing_ranks(const ConditionReport& r) {
  std::vector<std::size_t> out;
  for (const auto& v : r.verdicts)
    if (!v.holds) out.push_back(v.i);
  return out;
}

inline json analyze_srbm(const SrbmSpec& s) {
  json out = {{"reflection_class", to_json(classify(s.r))}};
  if (s.zero_noise) return out;
  out["ssineq"] = to_json(check_ssineq(s.r, s.a));
  out["skew_symmetric"] = check_skew_symmetry(s.r, s.a);
  if (s.dim() == 2) out["wedge"] = to_json(wedge_geometry(s.r, s.a));
  return out;
}

inline json analyze(const Config& c) {
  json out;
  if (is_particle_config(c)) {
    const auto spec = read_particle_spec(c);
    c.finish();
    const auto prediction = predict_behavior(spec);
    const auto gap = to_srbm(spec);
    out["spec"] = to_json(spec);
    out["classical"] = spec.is_classical();
    if (spec.is_classical()) out["concavity"] = to_json(check_concavity(spec.sigma2));
    out["asymmetric"] = to_json(check_asymmetric(spec));
    out["prediction"] = to_json(prediction);
    out["triple_collision_ranks"] = failing_ranks(prediction);
    out["gap_srbm"] = to_json(gap);
    out["gap_analysis"] = analyze_srbm(gap);
  } else {
    const auto spec = read_srbm_spec(c);
    c.finish();
    out["spec"] = to_json(spec);
    out["srbm_analysis"] = analyze_srbm(spec);
  }
  return out;
}

inline json wedge(const Config& c) {
  const SrbmSpec s = read_any_srbm(c);
  c.finish();
  if (s.zero_noise) throw ConfigError("wedge needs a covariance matrix");
  if (s.dim() != 2) throw ConfigError("wedge needs a two-dimensional SRBM (or three particles)");
  json out = to_json(wedge_geometry(s.r, s.a));
  out["skew_symmetry_transfer"] = skew_symmetry_transfer_check(s.r, s.a);
  return out;
}

inline std::vector<std::string> simulate(const Config& c, const std::filesystem::path& dir) {
  const std::uint64_t seed = c.seed();
  const double t_end = c.positive("t_end");
  const double dt = c.positive("dt");
  const double delta = c.positive("delta", kDefaultCollisionDelta);
  std::vector<std::string> written;
  if (is_particle_config(c)) {
    const auto spec = read_particle_spec(c);
    const Vector y0 = c.vector("y0");
    if (read_scheme(c, Discretization::projected) != Discretization::projected) {
      throw ConfigError("ranked particle simulation supports only the projected scheme");
    }
    const bool zero_noise = c.flag("zero_noise", false);
    c.finish();
    const auto sim = simulate_ranked(spec, y0, t_end, dt, seed, zero_noise);
    std::ostringstream path_csv, ranked_csv;
    write_path_csv(path_csv, sim.gaps);
    write_ranked_csv(ranked_csv, sim.ranked);
    write_file(dir / "path.csv", path_csv.str());
    write_file(dir / "ranked.csv", ranked_csv.str());
    write_file(dir / "collisions.json", dump(to_json(detect_collisions(sim.gaps, delta))));
    written = {"path.csv", "ranked.csv", "collisions.json"};
  } else {
    const auto spec = read_srbm_spec(c);
    const Vector x0 = c.vector("x0");
    const auto scheme = read_scheme(c, Discretization::projected);
    c.finish();
    const auto path = simulate_srbm(spec, x0, t_end, dt, seed, scheme);
    std::ostringstream csv;
    write_path_csv(csv, path);
    write_file(dir / "path.csv", csv.str());
    write_file(dir / "collisions.json", dump(to_json(detect_collisions(path, delta))));
    written = {"path.csv", "collisions.json"};
  }
  return written;
}

inline std::vector<double> read_dt_list(const Config& c) {
  if (!c.has("dt_list")) return {1e-2, 1e-3, 1e-4};
  return c.vector("dt_list");
}

inline ExperimentResult experiment(const std::string& name, const Config& c) {
  if (name == "hitting_probability") {
    const double b = c.positive("b");
    const double x = c.number("x");
    const double t_end = c.positive("t_end", 50.0);
    const double dt = c.positive("dt", 1e-4);
    const std::size_t trials = c.count("trials", 10'000);
    const std::uint64_t seed = c.seed();
    c.finish();
    return hitting_probability_experiment(b, x, t_end, dt, trials, seed);
  }
  if (name == "dichotomy") {
    DichotomyConfig d{read_particle_spec(c)};
    d.rank_k = c.count("rank_k", d.rank_k);
    d.delta = c.positive("delta", d.delta);
    d.dt_list = read_dt_list(c);
    d.t_end = c.positive("t_end", d.t_end);
    d.trials = c.count("trials", d.trials);
    d.initial_gap = c.positive("initial_gap", d.initial_gap);
    d.scheme = read_scheme(c, d.scheme);
    d.seed = c.seed();
    c.finish();
    return dichotomy_experiment(d);
  }
  if (name == "stationarity") {
    StationarityConfig s{read_any_srbm(c)};
    s.t_burn = c.number("t_burn", s.t_burn);
    s.t_end = c.positive("t_end", s.t_end);
    s.dt = c.positive("dt", s.dt);
    s.sample_spacing = c.positive("sample_spacing", s.sample_spacing);
    s.chains = c.count("chains", s.chains);
    s.scheme = read_scheme(c, s.scheme);
    s.seed = c.seed();
    c.finish();
    return stationarity_experiment(s);
  }
  if (name == "comparison") {
    const SrbmSpec spec = read_srbm_spec(c);
    ComparisonConfig k{spec.r, Matrix{}, spec.mu, spec.a, c.vector("x0")};
    if (c.has("r_bar") && c.document().at("r_bar").is_string()) {
      if (c.text("r_bar", "") != "minorant") throw ConfigError("field 'r_bar' must be a matrix or \"minorant\"");
      k.r_bar = skew_symmetric_minorant(spec.r, spec.a);
    } else {
      k.r_bar = c.matrix("r_bar");
    }
    k.t_end = c.positive("t_end", k.t_end);
    k.dt = c.positive("dt", k.dt);
    k.seeds = c.count("seeds", k.seeds);
    k.seed = c.seed();
    c.finish();
    return comparison_experiment(k);
  }
  if (name == "gap_equivalence") {
    GapEquivalenceConfig g{read_particle_spec(c), c.vector("x0")};
    g.t_check = c.positive("t_check", g.t_check);
    g.dt = c.positive("dt", g.dt);
    g.trials = c.count("trials", g.trials);
    g.scheme = read_scheme(c, g.scheme);
    g.seed = c.seed();
    c.finish();
    return gap_equivalence_experiment(g);
  }
  throw ConfigError("unknown experiment '" + name +
                    "' (expected hitting_probability, dichotomy, stationarity, comparison or gap_equivalence)");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collision analysis and simulation for competing Brownian particles"};
  app.require_subcommand(1);
  std::string config, out_dir, name;

  auto* analyze_cmd = app.add_subcommand("analyze", "Check collision conditions and classify the reflection matrix");
  analyze_cmd->add_option("--config", config, "JSON spec")->required();
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a path and write CSV plus a collision report");
  simulate_cmd->add_option("--config", config, "JSON spec and simulation parameters")->required();
  simulate_cmd->add_option("--out", out_dir, "Output directory")->required();
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  experiment_cmd->add_option("--name", name, "Experiment id")->required();
  experiment_cmd->add_option("--config", config, "JSON parameters")->required();
  experiment_cmd->add_option("--out", out_dir, "Output directory")->required();
  auto* wedge_cmd = app.add_subcommand("wedge", "Wedge geometry of a planar SRBM");
  wedge_cmd->add_option("--config", config, "JSON spec")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const Config cfg = Config::load(config);
    if (analyze_cmd->parsed()) {
      out << dump(analyze(cfg));
    } else if (wedge_cmd->parsed()) {
      out << dump(wedge(cfg));
    } else if (simulate_cmd->parsed()) {
      const auto dir = prepare_out_dir(out_dir);
      for (const auto& f : simulate(cfg, dir)) out << (dir / f).string() << "\n";
    } else {
      const auto dir = prepare_out_dir(out_dir);
      const auto result = experiment(name, cfg);
      const auto file = dir / (name + ".json");
      write_file(file, dump(to_json(result)));
      out << name << ": " << to_string(result.verdict) << " -> " << file.string() << "\n";
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const json::exception& e) {
    err << "invalid config: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace collide::cli
