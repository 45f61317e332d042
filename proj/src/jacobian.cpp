#include "floquet/jacobian.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

constexpr double kPi = std::numbers::pi;

void finish(JacobianReport& r) {
  const int n = int(r.J.cols());
  r.max_abs = n ? r.J.cwiseAbs().maxCoeff() : 0.0;
  r.ztol = 1e-6 * r.max_abs;
  r.det = Eigen::FullPivLU<Eigen::MatrixXd>(r.J).determinant();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.J);
  const auto& sv = svd.singularValues();
  r.rank = 0;
  for (int i = 0; i < sv.size(); ++i) r.rank += sv(i) > r.ztol;
  r.cond = (sv.size() && sv(sv.size() - 1) > 0) ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  r.zero_columns.clear();
  for (int i = 0; i < n; ++i)
    if (r.J.col(i).norm() < r.ztol) r.zero_columns.push_back(i);
  // d det = sum_i det(v_1, .., dv_i, .., v_n), each bounded by Hadamard
  r.det_noise = 0;
  for (int i = 0; i < n; ++i) {
    double p = r.noise.col(i).norm();
    for (int k = 0; k < n; ++k)
      if (k != i) p *= r.J.col(k).norm();
    r.det_noise += p;
  }
}

}  // namespace

double JacobianReport::permuted_det(const std::vector<int>& perm) const {
  Eigen::MatrixXd P(J.rows(), J.cols());
  for (size_t i = 0; i < perm.size(); ++i) P.col(i) = J.col(perm[i]);
  return Eigen::FullPivLU<Eigen::MatrixXd>(P).determinant();
}

JacobianReport reorder(const JacobianReport& r, const std::vector<int>& perm) {
  JacobianReport o = r;
  const int n = int(perm.size());
  for (int a = 0; a < n; ++a) {
    o.labels[a] = r.labels[perm[a]];
    for (int b = 0; b < n; ++b) {
      o.J(a, b) = r.J(perm[a], perm[b]);
      o.noise(a, b) = r.noise(perm[a], perm[b]);
    }
  }
  finish(o);
  return o;
}

JacobianReport jacobian(InvariantEvaluator& ev, const ManifoldPoint& pt, double h_alpha, JacobianMethod method) {
  JacobianReport r;
  r.labels = pt.E0c();
  const int n = int(r.labels.size());
  if (method == JacobianMethod::Analytic) {
    const auto a = ev.derivatives(pt, ev.grid());
    const auto b = ev.derivatives(pt, 2 * ev.grid());
    r.J = a.J;
    r.noise = a.J_round + (a.J - b.J).cwiseAbs();
  } else {
    if (!(h_alpha > 0)) throw OutOfRange("h_alpha must be positive");
    r.J.resize(n, n);
    r.noise.resize(n, n);
    const double base_noise = ev.invariant_vector(pt, true).doubling_change;
    double signal = 0;
    for (int row = 0; row < n; ++row) {
      const Coord c = r.labels[row];
      const auto p = ev.invariant_vector(pt.with_alpha(c, pt.alpha(c) + h_alpha), false).phi;
      const auto m = ev.invariant_vector(pt.with_alpha(c, pt.alpha(c) - h_alpha), false).phi;
      const auto p2 = ev.invariant_vector(pt.with_alpha(c, pt.alpha(c) + 2 * h_alpha), false).phi;
      const auto m2 = ev.invariant_vector(pt.with_alpha(c, pt.alpha(c) - 2 * h_alpha), false).phi;
      for (int i = 0; i < n; ++i) {
        const double d1 = (p(i) - m(i)) / (2 * h_alpha);
        const double d2 = (p2(i) - m2(i)) / (4 * h_alpha);
        r.J(row, i) = d1;
        // truncation from the two step sizes, quadrature noise amplified by 1/h
        r.noise(row, i) = std::abs(d1 - d2) / 3.0 + base_noise / h_alpha;
        signal = std::max(signal, std::abs(p(i) - m(i)));
      }
    }
    if (signal < 10.0 * ev.quad_tol()) {
      std::ostringstream os;
      os << "largest difference " << signal << " is below 10x the quadrature tolerance";
      throw QuadratureNoiseDominates(os.str());
    }
  }
  finish(r);
  return r;
}

namespace {

bool at_eps0(const ManifoldPoint& pt) { return pt.eps[2] == 0 && pt.eps[3] == 0; }

}  // namespace

StructureReport structure_at_eps0(InvariantEvaluator& ev, const ManifoldPoint& pt, double tol) {
  if (!at_eps0(pt)) throw OutOfRange("structure is checked at eps0");
  StructureReport s;
  const auto d = ev.derivatives(pt, ev.grid());
  const auto b = ev.derivatives(pt, 2 * ev.grid());
  s.jac.labels = d.index;
  s.jac.J = d.J;
  s.jac.noise = d.J_round + (d.J - b.J).cwiseAbs();
  finish(s.jac);
  s.J_e3 = d.J_e3;
  const int n = pt.n(), N = int(d.index.size());
  s.expected_rank = N - n;
  const double scale = std::max(s.jac.max_abs, s.J_e3.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) s.zero_column_ratio = std::max(s.zero_column_ratio, s.jac.J.col(i).norm() / s.jac.max_abs);
  auto consider = [&](double v, int row, int col) {
    if (std::abs(v) / scale > s.off_pattern) {
      s.off_pattern = std::abs(v) / scale;
      s.off_pattern_row = d.index[row];
      s.off_pattern_col = d.index[col];
    }
  };
  for (int col = 0; col < N; ++col)
    for (int row = 0; row < N; ++row) {
      if (row == col) continue;
      if (col < n) {
        // d v_i / d eps3: diagonal plus the I_3 row block
        if (d.index[row].j == 3) {
          if (std::abs(d.J_e3(row, col)) > 1e-8 * scale) s.i3_block_nonzero = true;
          continue;
        }
        consider(d.J_e3(row, col), row, col);
      } else {
        consider(d.J(row, col), row, col);
      }
    }
  if (s.off_pattern > tol) {
    std::ostringstream os;
    os << "entry (" << s.off_pattern_row.j << "," << s.off_pattern_row.m << ") of column (" << s.off_pattern_col.j
       << "," << s.off_pattern_col.m << ") is " << s.off_pattern << " of the scale";
    throw PatternViolation(os.str());
  }
  return s;
}

ReducedDeterminant reduced_determinant(InvariantEvaluator& ev, const ManifoldPoint& pt) {
  if (!at_eps0(pt)) throw OutOfRange("the reduced determinant is evaluated at eps0");
  const auto d = ev.derivatives(pt, ev.grid());
  const int n = pt.n();
  ReducedDeterminant r;
  r.R = d.J;
  for (int i = 0; i < n; ++i) r.R.col(i) = d.J_e3.col(i);
  r.direct = Eigen::FullPivLU<Eigen::MatrixXd>(r.R).determinant();
  r.diagonal = r.R.diagonal();
  r.diagonal_product = r.diagonal.prod();
  return r;
}

std::vector<std::pair<ManifoldPoint, bool>> scan_alpha_samples(const ManifoldPoint& pt, const ScanSpecification& spec) {
  std::vector<std::pair<ManifoldPoint, bool>> out;
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> u(0.0, kPi);
  const auto coords = pt.E0c();
  auto generic = [&](const ManifoldPoint& p) {
    for (const auto& c : coords) {
      const double a = std::fmod(p.alpha(c), kPi / 2);
      if (a < spec.margin || a > kPi / 2 - spec.margin) return false;
      if (c.j == 3 && c.m >= 2)
        for (int j = 1; j <= 2; ++j)
          if (c.m <= p.I(j) && std::abs(std::sin(2 * p.alpha(c) - 2 * p.alpha({j, c.m}))) < std::sin(2 * spec.margin))
            return false;
    }
    return true;
  };
  while (int(out.size()) < spec.generic_alphas) {
    ManifoldPoint p = pt;
    for (const auto& c : coords) p = p.with_alpha(c, u(rng));
    if (generic(p)) out.emplace_back(p, false);
  }
  if (out.empty()) return out;
  int k = 0;
  for (const auto& c : coords)
    if (c.j >= 3) out.emplace_back(out[0].first.with_alpha(c, (k++ % 2) * kPi / 2), true);
  return out;
}

ScanResult rigidity_scan(InvariantEvaluator& ev, const ManifoldPoint& pt, const ScanSpecification& spec) {
  ScanResult res;
  const auto samples = scan_alpha_samples(pt, spec);
  for (const auto& s : samples) res.alphas.push_back(s.first);
  for (double e3 : spec.eps3)
    for (double e4 : spec.eps4)
      for (size_t a = 0; a < samples.size(); ++a) {
        ScanCell c;
        c.eps3 = e3;
        c.eps4 = e4;
        c.alpha_id = int(a);
        c.degenerate = samples[a].second;
        res.cells.push_back(c);
      }
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i; (i = next++) < res.cells.size();) {
      auto& c = res.cells[i];
      ManifoldPoint p = samples[c.alpha_id].first;
      p.eps[2] = c.eps3;
      p.eps[3] = c.eps4;
      try {
        const auto r = jacobian(ev, p, 0.0, JacobianMethod::Analytic);
        c.abs_det = std::abs(r.det);
        c.noise_floor = r.det_noise;
        c.certified = c.abs_det > 10.0 * c.noise_floor && c.abs_det > 0;
      } catch (const Error& e) {
        c.error = e.what();
      }
    }
  };
  const int nt = std::max(1, spec.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  int generic = 0, cert = 0;
  for (const auto& c : res.cells) {
    if (!c.error.empty()) ++res.failures;
    if (c.degenerate) {
      res.degenerate_certified += c.certified;
    } else {
      ++generic;
      cert += c.certified;
    }
  }
  res.certified_fraction_generic = generic ? double(cert) / generic : 0.0;
  return res;
}

}  // namespace floquet
