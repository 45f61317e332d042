#include "floquet/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "floquet/errors.hpp"
#include "floquet/weierstrass.hpp"

namespace floquet {

using nlohmann::json;

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.v1 = {1.0, 0.0};
  c.v2 = {std::sqrt(2.0) / 4.0, std::exp(1.0) / 2.0};
  c.directions = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  c.gaps = {{8.0, 1.0}, {8.0, 1.0}, {1.0, 0.8}, {0.5, 0.5}};
  c.alpha = {{0.0, 0.41}, {0.0, 0.93}, {0.27, 1.13}, {0.61, 0.35}};
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["lattice"] = {{"v1", v1}, {"v2", v2}};
  j["directions"] = directions;
  j["eps"] = eps;
  j["gaps"] = gaps;
  j["alpha"] = alpha;
  j["grid"] = grid;
  j["tolerances"] = {{"quad", tol.quad}, {"ode", tol.ode}, {"root", tol.root}, {"gap", tol.gap}, {"flow", tol.flow}};
  j["output_dir"] = output_dir;
  j["potential"] = {{"type", potential.type},          {"amplitude", potential.amplitude},
                    {"n", potential.n},                {"tau", potential.tau},
                    {"multiplier", potential.multiplier}, {"shift", potential.shift},
                    {"cos", potential.cos_coeffs},     {"sin", potential.sin_coeffs}};
  j["m_max"] = m_max;
  j["flow_samples"] = flow_samples;
  j["beta"] = beta;
  j["scan"] = {{"eps3", scan.eps3}, {"eps4", scan.eps4}, {"alpha_points", scan.alpha_points}, {"seed", scan.seed}};
  return j;
}

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void positive(double v, const std::string& name) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(name + " must be positive");
}

bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c = default_config();
  only_keys(j,
            {"lattice", "directions", "eps", "gaps", "alpha", "grid", "tolerances", "output_dir", "potential", "m_max",
             "flow_samples", "beta", "scan"},
            "config");
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    only_keys(l, {"v1", "v2"}, "lattice");
    read(l, "v1", c.v1, "lattice");
    read(l, "v2", c.v2, "lattice");
  }
  read(j, "directions", c.directions, "config");
  read(j, "eps", c.eps, "config");
  read(j, "gaps", c.gaps, "config");
  read(j, "alpha", c.alpha, "config");
  read(j, "grid", c.grid, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "m_max", c.m_max, "config");
  read(j, "flow_samples", c.flow_samples, "config");
  read(j, "beta", c.beta, "config");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    only_keys(t, {"quad", "ode", "root", "gap", "flow"}, "tolerances");
    read(t, "quad", c.tol.quad, "tolerances");
    read(t, "ode", c.tol.ode, "tolerances");
    read(t, "root", c.tol.root, "tolerances");
    read(t, "gap", c.tol.gap, "tolerances");
    read(t, "flow", c.tol.flow, "tolerances");
  }
  if (j.contains("potential")) {
    const auto& p = j["potential"];
    only_keys(p, {"type", "amplitude", "n", "tau", "multiplier", "shift", "cos", "sin"}, "potential");
    read(p, "type", c.potential.type, "potential");
    read(p, "amplitude", c.potential.amplitude, "potential");
    read(p, "n", c.potential.n, "potential");
    read(p, "tau", c.potential.tau, "potential");
    read(p, "multiplier", c.potential.multiplier, "potential");
    read(p, "shift", c.potential.shift, "potential");
    read(p, "cos", c.potential.cos_coeffs, "potential");
    read(p, "sin", c.potential.sin_coeffs, "potential");
  }
  if (j.contains("scan")) {
    const auto& s = j["scan"];
    only_keys(s, {"eps3", "eps4", "alpha_points", "seed"}, "scan");
    read(s, "eps3", c.scan.eps3, "scan");
    read(s, "eps4", c.scan.eps4, "scan");
    read(s, "alpha_points", c.scan.alpha_points, "scan");
    read(s, "seed", c.scan.seed, "scan");
  }

  positive(c.tol.quad, "tolerances.quad");
  positive(c.tol.ode, "tolerances.ode");
  positive(c.tol.root, "tolerances.root");
  positive(c.tol.gap, "tolerances.gap");
  positive(c.tol.flow, "tolerances.flow");
  if (!power_of_two(c.grid)) throw ConfigError("grid must be a power of two");
  if (c.m_max < 1) throw ConfigError("m_max must be at least 1");
  if (c.flow_samples < 1) throw ConfigError("flow_samples must be at least 1");
  if (!(c.beta > 0 && c.beta < 1)) throw ConfigError("beta must lie in (0,1)");
  if (c.scan.alpha_points < 1) throw ConfigError("scan.alpha_points must be at least 1");
  const std::set<std::string> types{"zero", "cosine", "wp", "fourier"};
  if (!types.count(c.potential.type)) throw ConfigError("unknown potential type '" + c.potential.type + "'");
  if (c.potential.type == "wp") positive(c.potential.tau, "potential.tau");
  if (c.gaps.size() != c.directions.size() || c.alpha.size() != c.directions.size())
    throw ConfigError("gaps and alpha need one row per direction");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // the output location is not part of the experiment
  auto j = cfg.to_json();
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ManifoldPoint make_point(const ExperimentConfig& cfg) {
  ManifoldPoint pt;
  try {
    pt.lattice = build_lattice({cfg.v1[0], cfg.v1[1]}, {cfg.v2[0], cfg.v2[1]});
    for (size_t i = 0; i < cfg.directions.size(); ++i) {
      DirectionData d;
      d.dir = make_direction(pt.lattice, cfg.directions[i][0], cfg.directions[i][1], int(i) + 1);
      d.gaps = cfg.gaps[i];
      d.alpha = cfg.alpha[i];
      pt.dirs.push_back(d);
    }
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  pt.eps = cfg.eps;
  pt.validate();
  return pt;
}

Potential1D make_potential(const PotentialSpec& p) {
  if (p.type == "zero") return Potential1D::zero();
  if (p.type == "cosine") return Potential1D::cosine(p.amplitude, p.n);
  if (p.type == "fourier") return Potential1D(p.cos_coeffs, p.sin_coeffs);
  auto q = one_gap_potential(make_wp_params(p.tau));
  return q.scaled(p.multiplier / 2.0).translated(p.shift);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns, const std::string& hash)
    : ncols_(columns.size()) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  out_.open(path);
  if (!out_) throw ConfigError("cannot write " + path);
  out_ << "# config_hash=" << hash << "\n";
  for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  for (double v : values) s.push_back(format_double(v));
  return row(s);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != ncols_) throw OutOfRange("CSV row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << "\n";
  return *this;
}

}  // namespace floquet
