#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "collide/experiments.hpp"
#include "collide/matrix.hpp"
#include "collide/matrix_analysis.hpp"
#include "collide/particle_systems.hpp"
#include "collide/srbm.hpp"
#include "collide/srbm_spec.hpp"
#include "collide/wedge.hpp"

namespace collide {

using json = nlohmann::json;

// Malformed or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const ParticleSystemSpec& s) {
  return {{"n", s.n()}, {"drifts", s.drifts}, {"sigma2", s.sigma2}, {"q_plus", s.q_plus}, {"q_minus", s.q_minus}};
}

inline json to_json(const SrbmSpec& s) {
  json out = {{"r", to_json(s.r)}, {"mu", s.mu}};
  if (s.zero_noise) {
    out["zero_noise"] = true;
  } else {
    out["a"] = to_json(s.a);
  }
  return out;
}

inline json to_json(const ConditionReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back({{"i", v.i}, {"j", v.j}, {"holds", v.holds}, {"slack", v.slack}});
  return {{"kind", std::string(to_string(r.kind))}, {"overall_avoids", r.overall_avoids}, {"verdicts", verdicts}};
}

inline json to_json(const MatrixClassReport& r) {
  json out = {{"is_reflection", r.is_reflection},
              {"is_z", r.is_z},
              {"is_s", r.is_s},
              {"is_completely_s", r.is_completely_s},
              {"is_nonsingular_m", r.is_nonsingular_m},
              {"marginal", r.marginal}};
  out["spectral_radius_of_q"] = r.spectral_radius_of_q ? json(*r.spectral_radius_of_q) : json(nullptr);
  return out;
}

inline json to_json(const WedgeGeometry& g) {
  return {{"xi", g.xi},
          {"theta1", g.theta1},
          {"theta2", g.theta2},
          {"theta_sum", g.theta1 + g.theta2},
          {"n1", g.n1},
          {"n2", g.n2},
          {"v1", g.v1},
          {"v2", g.v2},
          {"hits_corner", g.hits_corner},
          {"marginal", g.marginal}};
}

inline json to_json(const CollisionReport& r) {
  json pairs = json::array();
  for (std::size_t p = 0; p < r.pairs.size(); ++p) {
    const auto& s = r.pairs[p];
    pairs.push_back({{"i", s.i},
                     {"j", s.j},
                     {"min_max", s.min_max},
                     {"near_simultaneous_count", r.near_simultaneous_count[p]}});
  }
  json triples = json::array();
  for (std::size_t k = 0; k < r.near_triple_count.size(); ++k)
    triples.push_back({{"rank", k + 2}, {"count", r.near_triple_count[k]}});
  return {{"delta", r.delta}, {"pairs", pairs}, {"near_triple", triples}};
}

inline json to_json(const ExperimentResult& r) {
  return {{"name", r.name},
          {"parameters", r.parameters},
          {"estimates", r.estimates},
          {"ci_halfwidths", r.ci_halfwidths},
          {"verdict", std::string(to_string(r.verdict))},
          {"trials", r.trials},
          {"seed_base", r.seed_base}};
}

inline ExperimentVerdict parse_verdict(std::string_view s) {
  if (s == "pass") return ExperimentVerdict::pass;
  if (s == "fail") return ExperimentVerdict::fail;
  if (s == "inconclusive") return ExperimentVerdict::inconclusive;
  throw ConfigError("unknown verdict '" + std::string(s) + "'");
}

inline ExperimentResult experiment_from_json(const json& j) {
  ExperimentResult r;
  r.name = j.at("name").get<std::string>();
  r.parameters = j.at("parameters").get<std::map<std::string, double>>();
  r.estimates = j.at("estimates").get<std::map<std::string, double>>();
  r.ci_halfwidths = j.at("ci_halfwidths").get<std::map<std::string, double>>();
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.trials = j.at("trials").get<std::size_t>();
  r.seed_base = j.at("seed_base").get<std::uint64_t>();
  return r;
}

// Fixed CSV schema: t,Z_1..Z_d,Y_1..Y_d with 17 significant digits.
inline void write_path_csv(std::ostream& out, const SimulatedPath& path) {
  const std::size_t d = path.dim();
  out << 't';
  for (std::size_t i = 1; i <= d; ++i) out << ",Z_" << i;
  for (std::size_t i = 1; i <= d; ++i) out << ",Y_" << i;
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < path.size(); ++k) {
    put(path.times[k]);
    for (double v : path.states[k]) out << ',', put(v);
    for (double v : path.regulators[k]) out << ',', put(v);
    out << '\n';
  }
}

// Ranked positions: t,P_1..P_N.
inline void write_ranked_csv(std::ostream& out, const RankedPath& path) {
  const std::size_t n = path.positions.empty() ? 0 : path.positions.front().size();
  out << 't';
  for (std::size_t i = 1; i <= n; ++i) out << ",P_" << i;
  out << '\n';
  char buf[32];
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", path.times[k]);
    out << buf;
    for (double v : path.positions[k]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Configuration

// A flat JSON object of named fields. Every field must be consumed by the
// command that reads it; finish() rejects leftovers so typos surface.
class Config {
 public:
  explicit Config(json doc) : doc_(std::move(doc)) {
    if (!doc_.is_object()) throw ConfigError("config must be a JSON object");
  }

  static Config parse(std::string_view text) {
    try {
      return Config(json::parse(text));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }

  static Config load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + file.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
  }

  const json& document() const { return doc_; }

  bool has(const std::string& key) const { return doc_.contains(key); }

  double number(const std::string& key) const {
    const json& v = field(key);
    if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("field '" + key + "' must be finite");
    return x;
  }

  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) const {
    const double x = number(key);
    if (!(x > 0.0)) throw ConfigError("field '" + key + "' must be positive");
    return x;
  }

  double positive(const std::string& key, double fallback) const { return has(key) ? positive(key) : fallback; }

  std::uint64_t unsigned_integer(const std::string& key) const {
    const json& v = field(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError("field '" + key + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto n = unsigned_integer(key);
    if (n == 0) throw ConfigError("field '" + key + "' must be positive");
    return static_cast<std::size_t>(n);
  }

  // Seeds are mandatory wherever randomness is involved.
  std::uint64_t seed() const {
    if (!has("seed")) throw ConfigError("field 'seed' is required");
    return unsigned_integer("seed");
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = field(key);
    if (!v.is_boolean()) throw ConfigError("field '" + key + "' must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = field(key);
    if (!v.is_string()) throw ConfigError("field '" + key + "' must be a string");
    return v.get<std::string>();
  }

  Vector vector(const std::string& key) const {
    const json& v = field(key);
    if (!v.is_array() || v.empty()) throw ConfigError("field '" + key + "' must be a nonempty array of numbers");
    Vector out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("field '" + key + "' must be a nonempty array of numbers");
      out.push_back(x.get<double>());
      if (!std::isfinite(out.back())) throw ConfigError("field '" + key + "' must be finite");
    }
    return out;
  }

  Matrix matrix(const std::string& key) const {
    const json& v = field(key);
    const std::string msg = "field '" + key + "' must be a nonempty rectangular array of number rows";
    if (!v.is_array() || v.empty()) throw ConfigError(msg);
    std::vector<double> entries;
    std::size_t cols = 0;
    for (const auto& row : v) {
      if (!row.is_array() || row.empty()) throw ConfigError(msg);
      if (cols == 0) cols = row.size();
      if (row.size() != cols) throw ConfigError(msg);
      for (const auto& x : row) {
        if (!x.is_number()) throw ConfigError(msg);
        entries.push_back(x.get<double>());
        if (!std::isfinite(entries.back())) throw ConfigError("field '" + key + "' must be finite");
      }
    }
    return Matrix(v.size(), cols, std::move(entries));
  }

  // Marks a field as consumed without reading it.
  void accept(const std::string& key) const { used_.insert(key); }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown field '" + key + "' for this command");
    }
  }

 private:
  const json& field(const std::string& key) const {
    used_.insert(key);
    if (!doc_.contains(key)) throw ConfigError("field '" + key + "' is required");
    return doc_.at(key);
  }

  json doc_;
  mutable std::set<std::string> used_;
};

inline bool is_particle_config(const Config& c) { return c.has("drifts") || c.has("sigma2"); }
inline bool is_srbm_config(const Config& c) { return c.has("r") || c.has("mu"); }

inline ParticleSystemSpec read_particle_spec(const Config& c) {
  if (is_srbm_config(c)) throw ConfigError("config mixes particle fields with SRBM fields (r, mu, a)");
  ParticleSystemSpec s;
  s.drifts = c.vector("drifts");
  s.sigma2 = c.vector("sigma2");
  const std::size_t n = s.drifts.size();
  s.q_plus = c.has("q_plus") ? c.vector("q_plus") : Vector(n, 0.5);
  s.q_minus = c.has("q_minus") ? c.vector("q_minus") : Vector(n, 0.5);
  if (c.has("n") && c.unsigned_integer("n") != n) {
    throw ConfigError("field 'n' does not match the length of 'drifts'");
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

inline SrbmSpec read_srbm_spec(const Config& c) {
  if (is_particle_config(c)) throw ConfigError("config mixes SRBM fields with particle fields");
  SrbmSpec s;
  s.r = c.matrix("r");
  s.mu = c.vector("mu");
  s.zero_noise = c.flag("zero_noise", false);
  if (s.zero_noise && !c.has("a")) {
    s.a = Matrix(s.mu.size(), s.mu.size());
  } else {
    s.a = c.matrix("a");
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

// The SRBM itself, or the gap process of a particle system.
inline SrbmSpec read_any_srbm(const Config& c) {
  if (is_particle_config(c)) return to_srbm(read_particle_spec(c));
  return read_srbm_spec(c);
}

inline Discretization read_scheme(const Config& c, Discretization fallback) {
  if (!c.has("scheme")) return fallback;
  try {
    return parse_discretization(c.text("scheme", ""));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'scheme': ") + e.what());
  }
}

}  // namespace collide
