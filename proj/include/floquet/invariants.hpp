#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "floquet/potential2d.hpp"

namespace floquet {

// Directional data sampled at u = k/N.
struct DirectionTables {
  std::vector<double> q;
  std::vector<std::vector<double>> dq;        // [m-1] d q_j / d alpha_{j,m}
  std::vector<double> q_eps3;                 // d q_3 / d eps3 (direction 3 only)
  std::vector<std::vector<double>> dq_eps3;   // [m-1] d^2 q_3 / d eps3 d alpha_{3,m}
  std::vector<std::vector<double>> phi_sq;    // [m-1] (phi_{j,m}^+)^2, empty for (j<=2, m=1)
  std::vector<std::vector<double>> dphi_sq;   // [m-1] d/d alpha_{j,m} of the above
};

struct Tables {
  int N = 0;
  std::vector<DirectionTables> dirs;
};

struct TableOptions {
  bool derivatives = true;
  double fd_step = 1e-5;  // alpha step for the E1 eigenfunction derivative
};

// (phi_{j,m}^+)^2 in the eps0 frame: 2cos^2(pi m u + alpha) for j >= 3 and the
// E1 limit eigenfunction for j <= 2, m >= 2.
Tables build_tables(const ManifoldPoint& pt, int N, LameCache& cache, const TableOptions& opt = {});

struct InvariantVector {
  std::vector<Coord> index;  // E0 complement order
  Eigen::VectorXd phi;
  int N = 0;
  double doubling_change = 0;  // max |Phi(N) - Phi(2N)|, 0 if not checked
};

// Quadrature of all Phi_{j,m}, (j,m) in E0c, from prebuilt tables.
Eigen::VectorXd phi_from_tables(const ManifoldPoint& pt, const Tables& t);

// Analytic alpha and eps3 derivatives evaluated inside the quadrature.
struct PhiDerivatives {
  std::vector<Coord> index;
  Eigen::VectorXd phi;
  Eigen::MatrixXd J;         // J(r, i) = d Phi_i / d alpha_r
  Eigen::VectorXd phi_e3;    // d Phi_i / d eps3
  Eigen::MatrixXd J_e3;      // d^2 Phi_i / d eps3 d alpha_r
  Eigen::MatrixXd J_round;   // rounding estimates of the entries of J
  Eigen::MatrixXd J_e3_round;
};
PhiDerivatives phi_derivatives(const ManifoldPoint& pt, const Tables& t);

class InvariantEvaluator {
 public:
  explicit InvariantEvaluator(int N = 256, double quad_tol = 1e-8) : N_(N), quad_tol_(quad_tol) {}

  int grid() const { return N_; }
  double quad_tol() const { return quad_tol_; }
  LameCache& cache() { return cache_; }

  // Phi over E0c at grid N; with check the 2N grid is compared and
  // QuadratureNotConverged raised beyond quad_tol.
  InvariantVector invariant_vector(const ManifoldPoint& pt, bool check = true);
  double phi(const ManifoldPoint& pt, int j, int m, bool check = true);
  PhiDerivatives derivatives(const ManifoldPoint& pt, int N = 0);

 private:
  int N_;
  double quad_tol_;
  LameCache cache_;
};

struct ClosedFormFit {
  double formula = 0;     // c_{1,2,j} A^1_{m|p|} A^2_{m|r|}
  double fitted_cos = 0;  // cos(2 alpha) coefficient of the least-squares fit
  double fitted_sin = 0;
  double offset = 0;      // constant of the fit
  double D = 0;           // (Phi(alpha) + Phi(alpha + pi/2)) / 2 at the point's alpha
  double residual = 0;    // max |Phi - fit| over the samples
  double d_spread = 0;    // spread of Phi(a) + Phi(a + pi/2) over the samples
};
ClosedFormFit phi_limit_closed_form(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, int samples = 8);

// Cosine coefficient n of the realized one-gap potential of direction l (1 or 2).
double lame_coefficient(InvariantEvaluator& ev, const ManifoldPoint& pt, int l, int n);

// int_0^1 e^{2 pi i n s} d(phi_{j,m}^+)^2/d alpha_{j,m} ds for the E1 limit
// eigenfunction of direction j (j <= 2) with alpha_{j,m} = alpha_jm.
std::complex<double> b_transform(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, double alpha_jm, int n,
                                 int N = 256, double h = 1e-5);
// b_{j,m,n} = int cos(2 pi n s + 2 alpha_{3,n}) d(phi)^2/d alpha ds.
double b_coeff(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, int n, double alpha3n);
double b_coeff(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, int n);

struct MixedDerivative {
  double method_a = 0;   // 2 c_{3,l,j} sum_n gamma_{3,n} A^l_n b_{j,m,n}
  double method_b = 0;   // central differences of Phi in (eps3, alpha)
  double discrepancy = 0;
  double coupling = 0;   // c_{3,l,j}
  double normalized = 0; // method_a / c_{3,l,j}
  double leading = 0;    // 2 A^l_m gamma_{3,m} sin(2 alpha_{3,m} - 2 alpha_{j,m})
};
struct MixedOptions {
  double eps3_step = 0.05;
  double alpha_step = 1e-3;
  bool throw_on_disagree = true;
};
MixedDerivative mixed_derivative(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m,
                                 const MixedOptions& opt = {});

struct Slack {
  std::string name;
  double value = 0;
};
struct EpsilonSelection {
  double eps1 = 0, eps2 = 0;
  std::vector<Slack> certificate;
  bool all_positive() const;
};
struct SelectionOptions {
  int per_decade = 8;      // log grid density
  double eps_min = 1e-6;
  int alpha_samples = 12;  // grid for sup/max over alpha
  int N = 256;
};
// Largest eps2 with eps2 |C| < sin beta, then the largest eps1 satisfying the
// (choiceone) and (choice) inequalities on the same log grid.
EpsilonSelection select_epsilons(InvariantEvaluator& ev, double beta, const ManifoldPoint& base,
                                 const SelectionOptions& opt = {});
// Slacks of all inequalities at a given (eps1, eps2).
std::vector<Slack> selection_slacks(InvariantEvaluator& ev, double beta, const ManifoldPoint& base, double eps1,
                                    double eps2, const SelectionOptions& opt = {});

}  // namespace floquet
