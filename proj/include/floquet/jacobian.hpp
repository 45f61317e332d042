#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "floquet/invariants.hpp"

namespace floquet {

enum class JacobianMethod { FiniteDifference, Analytic };

struct JacobianReport {
  std::vector<Coord> labels;  // rows and columns, E0c order
  Eigen::MatrixXd J;          // J(r, i) = d Phi_i / d alpha_r
  Eigen::MatrixXd noise;      // entrywise error estimate
  double det = 0;
  double det_noise = 0;       // first-order bound from the column noise
  double cond = 0;
  double max_abs = 0;
  double ztol = 0;            // 1e-6 max|J|
  int rank = 0;
  std::vector<int> zero_columns;

  // det with the columns taken in the order perm (a permutation of 0..n-1).
  double permuted_det(const std::vector<int>& perm) const;
};

// FiniteDifference: central differences of Phi with step h_alpha.
// Analytic: derivatives inside the quadrature, noise from rounding plus grid doubling.
JacobianReport jacobian(InvariantEvaluator& ev, const ManifoldPoint& pt, double h_alpha = 1e-4,
                        JacobianMethod method = JacobianMethod::FiniteDifference);

struct StructureReport {
  JacobianReport jac;
  Eigen::MatrixXd J_e3;               // d J / d eps3
  double zero_column_ratio = 0;       // max_{i<=n} |v_i| / max|J|
  double off_pattern = 0;             // largest off-pattern entry relative to the scale
  Coord off_pattern_row, off_pattern_col;
  int expected_rank = 0;
  bool i3_block_nonzero = false;      // some d^2 Phi_{j,m} / d alpha_{3,.} d eps3 with j <= 2 is nonzero
};
// Sparsity of J and dJ/deps3 at eps0; PatternViolation when off_pattern > tol.
StructureReport structure_at_eps0(InvariantEvaluator& ev, const ManifoldPoint& pt, double tol = 1e-5);

struct ReducedDeterminant {
  Eigen::MatrixXd R;  // (d v_1/d eps3, ..., d v_n/d eps3, v_{n+1}, ..., v_{N-2})
  double direct = 0;
  double diagonal_product = 0;
  Eigen::VectorXd diagonal;
};
ReducedDeterminant reduced_determinant(InvariantEvaluator& ev, const ManifoldPoint& pt);

// Jacobian with the pairs (j,m) enumerated in the given order.
JacobianReport reorder(const JacobianReport& r, const std::vector<int>& perm);

struct ScanCell {
  double eps3 = 0, eps4 = 0;
  int alpha_id = 0;
  bool degenerate = false;  // some alpha_{j,m}, j >= 3, is 0 mod pi/2
  double abs_det = 0, noise_floor = 0;
  bool certified = false;
  std::string error;
};
struct ScanSpecification {
  std::vector<double> eps3, eps4;
  int generic_alphas = 6;
  unsigned seed = 1;
  double margin = 0.15;  // generic samples keep alpha_{j,m} this far from k pi/2
  int threads = 1;
};
struct ScanResult {
  std::vector<ScanCell> cells;
  std::vector<ManifoldPoint> alphas;  // alpha tables by alpha_id
  double certified_fraction_generic = 0;
  int degenerate_certified = 0;
  int failures = 0;
};
// alpha tables: generic random ones followed by one degenerate copy of the first
// per (j,m) with j >= 3 (alternating 0 and pi/2).
std::vector<std::pair<ManifoldPoint, bool>> scan_alpha_samples(const ManifoldPoint& pt, const ScanSpecification& spec);
ScanResult rigidity_scan(InvariantEvaluator& ev, const ManifoldPoint& pt, const ScanSpecification& spec);

}  // namespace floquet
