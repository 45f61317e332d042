#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "floquet/potential1d.hpp"
#include "floquet/potential2d.hpp"

namespace floquet {

struct PotentialSpec {
  std::string type = "wp";  // zero | cosine | wp | fourier
  double amplitude = 2.0;   // cosine: amplitude * cos(2 pi n s)
  int n = 1;
  double tau = 1.0;         // wp: multiplier * wp(s + i tau/2) translated by shift
  double multiplier = 2.0;
  double shift = 0.0;
  std::vector<double> cos_coeffs, sin_coeffs;  // fourier
};

struct Tolerances {
  double quad = 1e-8;
  double ode = 1e-12;
  double root = 1e-15;
  double gap = 1e-8;
  double flow = 1e-13;
};

struct ScanSpec {
  std::vector<double> eps3{0.05, 0.1, 0.2, 0.3};
  std::vector<double> eps4{0.0};
  int alpha_points = 6;  // generic alpha tables per cell
  int seed = 1;
};

struct ExperimentConfig {
  std::array<double, 2> v1{1.0, 0.0}, v2{0.0, 1.0};
  std::vector<std::array<long, 2>> directions;
  std::array<double, 4> eps{0.5, 0.5, 0.0, 0.0};
  std::vector<std::vector<double>> gaps, alpha;
  int grid = 256;
  Tolerances tol;
  std::string output_dir = "out";
  PotentialSpec potential;
  int m_max = 10;
  int flow_samples = 16;
  double beta = 0.3;
  ScanSpec scan;

  nlohmann::json to_json() const;
};

// Desk-scale setup: four directions, two gaps each, 256^2 grid.
ExperimentConfig default_config();
// Missing keys take the defaults; unknown keys and bad values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// FNV-1a of the canonical JSON dump without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

ManifoldPoint make_point(const ExperimentConfig& cfg);
Potential1D make_potential(const PotentialSpec& spec);

// CSV with a comment line carrying the config hash, then the column header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns, const std::string& hash);
  CsvWriter& row(const std::vector<double>& values);
  CsvWriter& row(const std::vector<std::string>& values);

 private:
  std::ofstream out_;
  size_t ncols_;
};

std::string format_double(double v);

}  // namespace floquet
