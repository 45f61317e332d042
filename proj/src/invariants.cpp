#include "floquet/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void closed_form_phi(int m, double alpha, int N, std::vector<double>& phi, std::vector<double>* dphi) {
  phi.resize(N);
  if (dphi) dphi->resize(N);
  for (int k = 0; k < N; ++k) {
    const double x = kPi * m * double(k) / N + alpha;
    phi[k] = 2.0 * std::cos(x) * std::cos(x);
    if (dphi) (*dphi)[k] = -2.0 * std::sin(2.0 * x);
  }
}

// Squared E1 limit eigenfunction of direction j and, optionally, its central
// difference in alpha_{j,m}.
void e1_phi(const LameDirection& L, int m, double alpha, int N, double h, std::vector<double>& phi,
            std::vector<double>* dphi) {
  if (L.free) return closed_form_phi(m, alpha, N, phi, dphi);
  phi = limit_eigenfunction_E1(L.limit, m, L.alpha1, alpha, N).phi_sq;
  if (!dphi) return;
  const auto p = limit_eigenfunction_E1(L.limit, m, L.alpha1, alpha + h, N).phi_sq;
  const auto q = limit_eigenfunction_E1(L.limit, m, L.alpha1, alpha - h, N).phi_sq;
  dphi->resize(N);
  for (int k = 0; k < N; ++k) (*dphi)[k] = (p[k] - q[k]) / (2.0 * h);
}

double coupling(const ManifoldPoint& pt, int l, int k, int j) {
  return coupling_constant(pt.lattice, pt.direction(l), pt.direction(k), pt.direction(j));
}

}  // namespace

Tables build_tables(const ManifoldPoint& pt, int N, LameCache& cache, const TableOptions& opt) {
  Tables t;
  t.N = N;
  t.dirs.resize(pt.S());
  const auto g = effective_gaps(pt);
  for (int j = 1; j <= pt.S(); ++j) {
    auto& D = t.dirs[j - 1];
    const int I = pt.I(j);
    D.q = realize_directional(pt, j, cache).sample(N);
    D.dq.assign(I, {});
    D.phi_sq.assign(I, {});
    D.dphi_sq.assign(I, {});
    std::shared_ptr<const LameDirection> L;
    if (j <= 2) L = cache.get(g[j - 1][0], I);
    for (int m = 1; m <= I; ++m) {
      if (j <= 2 && m == 1) continue;
      const double a = pt.alpha({j, m});
      if (opt.derivatives) {
        auto& d = D.dq[m - 1];
        d.resize(N);
        double amp = g[j - 1][m - 1], damp = 0;
        if (j <= 2 && amp > 0) {
          // amplitude gamma / kappa(alpha) of the realized closed-level term
          const auto K = cache.gap_response(g[j - 1][0], m);
          const double kap = response_at(K, a);
          damp = -amp * response_dalpha(K, a) / (kap * kap);
          amp /= kap;
        }
        for (int k = 0; k < N; ++k) {
          const double x = 2.0 * kPi * m * double(k) / N + 2.0 * a;
          d[k] = damp * std::cos(x) - 2.0 * amp * std::sin(x);
        }
      }
      auto* dphi = opt.derivatives ? &D.dphi_sq[m - 1] : nullptr;
      if (j <= 2) e1_phi(*L, m, a, N, opt.fd_step, D.phi_sq[m - 1], dphi);
      else closed_form_phi(m, a, N, D.phi_sq[m - 1], dphi);
    }
    if (j == 3) {
      D.q_eps3.assign(N, 0.0);
      if (opt.derivatives) D.dq_eps3.assign(I, std::vector<double>(N, 0.0));
      for (int m = 1; m <= I; ++m) {
        const double gam = pt.base_gap({3, m}), a = pt.alpha({3, m});
        for (int k = 0; k < N; ++k) {
          const double x = 2.0 * kPi * m * double(k) / N + 2.0 * a;
          D.q_eps3[k] += gam * std::cos(x);
          if (opt.derivatives) D.dq_eps3[m - 1][k] = -2.0 * gam * std::sin(x);
        }
      }
    }
  }
  return t;
}

namespace {

struct Contribution {
  int e;
  Eigen::Vector2d w;
};

// One pass over the grid per direction; derivatives when the tables carry them.
PhiDerivatives integrate(const ManifoldPoint& pt, const Tables& t, bool derivs) {
  PhiDerivatives out;
  out.index = pt.E0c();
  const int nc = int(out.index.size());
  const int N = t.N;
  auto pos = [&](int j, int m) {
    for (int i = 0; i < nc; ++i)
      if (out.index[i].j == j && out.index[i].m == m) return i;
    return -1;
  };
  out.phi = Eigen::VectorXd::Zero(nc);
  if (derivs) {
    out.J = out.J_e3 = out.J_round = out.J_e3_round = Eigen::MatrixXd::Zero(nc, nc);
    out.phi_e3 = Eigen::VectorXd::Zero(nc);
  }
  const double scale = pt.lattice.vol_gamma / (double(N) * N);

  for (int j = 1; j <= pt.S(); ++j) {
    std::vector<int> cols, ms;
    for (int m = 1; m <= pt.I(j); ++m)
      if (pos(j, m) >= 0) cols.push_back(pos(j, m)), ms.push_back(m);
    if (cols.empty()) continue;
    const auto& dj = pt.direction(j);
    std::vector<Contribution> con;
    int c3 = -1;
    for (int e = 1; e <= pt.S(); ++e) {
      if (e == j) continue;
      const long ed = dj.dot_d(pt.direction(e));
      if (ed == 0) continue;
      if (e == 3) c3 = int(con.size());
      con.push_back({e, pt.direction(e).delta / double(ed)});
    }
    // rows touched by q_e through h
    struct RowRef {
      int ci, row, m;
    };
    std::vector<RowRef> rows;
    if (derivs)
      for (int ci = 0; ci < int(con.size()); ++ci)
        for (int m = 1; m <= pt.I(con[ci].e); ++m)
          if (int r = pos(con[ci].e, m); r >= 0) rows.push_back({ci, r, m});

    const int nm = int(cols.size());
    Eigen::VectorXd phi_row(nm), phi_e3_row(nm);
    Eigen::MatrixXd J_row(nc, nm), Je3_row(nc, nm), Jr(nc, nm), Je3r(nc, nm);
    Jr.setZero();
    Je3r.setZero();
    std::vector<int> idx(con.size());
    std::vector<double> hw(con.size());
    for (int i = 0; i < N; ++i) {
      phi_row.setZero();
      if (derivs) {
        phi_e3_row.setZero();
        J_row.setZero();
        Je3_row.setZero();
      }
      for (int k = 0; k < N; ++k) {
        Eigen::Vector2d h(0, 0);
        for (size_t c = 0; c < con.size(); ++c) {
          idx[c] = grid_index(pt.direction(con[c].e), i, k, N);
          h += con[c].w * t.dirs[con[c].e - 1].q[idx[c]];
        }
        const double hh = h.squaredNorm();
        const int ij = grid_index(dj, i, k, N);
        double g3 = 0;
        if (derivs) {
          for (size_t c = 0; c < con.size(); ++c) hw[c] = h.dot(con[c].w);
          if (c3 >= 0) g3 = 2.0 * hw[c3] * t.dirs[2].q_eps3[idx[c3]];
        }
        for (int a = 0; a < nm; ++a) {
          const double p = t.dirs[j - 1].phi_sq[ms[a] - 1][ij];
          phi_row(a) += hh * p;
          if (!derivs) continue;
          const double dp = t.dirs[j - 1].dphi_sq[ms[a] - 1][ij];
          const int own = cols[a];
          J_row(own, a) += hh * dp;
          Jr(own, a) += std::abs(hh * dp);
          for (const auto& rr : rows) {
            const double dq = t.dirs[con[rr.ci].e - 1].dq[rr.m - 1][idx[rr.ci]];
            const double v = 2.0 * hw[rr.ci] * dq * p;
            J_row(rr.row, a) += v;
            Jr(rr.row, a) += std::abs(v);
          }
          if (c3 < 0) continue;
          phi_e3_row(a) += g3 * p;
          Je3_row(own, a) += g3 * dp;
          Je3r(own, a) += std::abs(g3 * dp);
          const double Q3 = t.dirs[2].q_eps3[idx[c3]];
          for (const auto& rr : rows) {
            const int e = con[rr.ci].e;
            const double dq = t.dirs[e - 1].dq[rr.m - 1][idx[rr.ci]];
            double v = 2.0 * con[rr.ci].w.dot(con[c3].w) * dq * Q3 * p;
            if (e == 3) v += 2.0 * hw[c3] * t.dirs[2].dq_eps3[rr.m - 1][idx[c3]] * p;
            Je3_row(rr.row, a) += v;
            Je3r(rr.row, a) += std::abs(v);
          }
        }
      }
      for (int a = 0; a < nm; ++a) {
        out.phi(cols[a]) += phi_row(a);
        if (!derivs) continue;
        out.phi_e3(cols[a]) += phi_e3_row(a);
        out.J.col(cols[a]) += J_row.col(a);
        out.J_e3.col(cols[a]) += Je3_row.col(a);
      }
    }
    if (derivs)
      for (int a = 0; a < nm; ++a) {
        // two-level summation of N^2 terms: error below ~2N eps sum|terms|/N^2
        out.J_round.col(cols[a]) = 4.0 * N * kEps * scale * Jr.col(a);
        out.J_e3_round.col(cols[a]) = 4.0 * N * kEps * scale * Je3r.col(a);
      }
  }
  out.phi *= scale;
  if (derivs) {
    out.J *= scale;
    out.J_e3 *= scale;
    out.phi_e3 *= scale;
  }
  return out;
}

}  // namespace

Eigen::VectorXd phi_from_tables(const ManifoldPoint& pt, const Tables& t) { return integrate(pt, t, false).phi; }

PhiDerivatives phi_derivatives(const ManifoldPoint& pt, const Tables& t) {
  for (const auto& D : t.dirs)
    for (size_t m = 0; m < D.phi_sq.size(); ++m)
      if (!D.phi_sq[m].empty() && D.dphi_sq[m].empty()) throw OutOfRange("tables were built without derivatives");
  return integrate(pt, t, true);
}

InvariantVector InvariantEvaluator::invariant_vector(const ManifoldPoint& pt, bool check) {
  InvariantVector v;
  v.index = pt.E0c();
  v.N = N_;
  const TableOptions no_d{false, 1e-5};
  v.phi = phi_from_tables(pt, build_tables(pt, N_, cache_, no_d));
  if (check) {
    const Eigen::VectorXd p2 = phi_from_tables(pt, build_tables(pt, 2 * N_, cache_, no_d));
    v.doubling_change = (p2 - v.phi).cwiseAbs().maxCoeff();
    if (v.doubling_change > quad_tol_) {
      std::ostringstream os;
      os << "grid doubling " << N_ << " -> " << 2 * N_ << " changes Phi by " << v.doubling_change;
      throw QuadratureNotConverged(os.str());
    }
  }
  return v;
}

double InvariantEvaluator::phi(const ManifoldPoint& pt, int j, int m, bool check) {
  const auto v = invariant_vector(pt, check);
  for (size_t i = 0; i < v.index.size(); ++i)
    if (v.index[i] == Coord{j, m}) return v.phi(i);
  throw OutOfRange("(" + std::to_string(j) + "," + std::to_string(m) + ") is not an invariant index");
}

PhiDerivatives InvariantEvaluator::derivatives(const ManifoldPoint& pt, int N) {
  if (N <= 0) N = N_;
  return phi_derivatives(pt, build_tables(pt, N, cache_));
}

double lame_coefficient(InvariantEvaluator& ev, const ManifoldPoint& pt, int l, int n) {
  const auto L = ev.cache().get(pt.eps[l - 1] * pt.base_gap({l, 1}), pt.I(l));
  return L->free ? 0.0 : L->coeff(n);
}

ClosedFormFit phi_limit_closed_form(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, int samples) {
  if (j < 3) throw OutOfRange("closed form applies to j >= 3");
  if (pt.eps[2] != 0 || pt.eps[3] != 0) throw OutOfRange("closed form holds at eps0");
  const auto& d = pt.direction(j);
  ClosedFormFit f;
  f.formula = coupling(pt, 1, 2, j) * lame_coefficient(ev, pt, 1, int(m * std::abs(d.p))) *
              lame_coefficient(ev, pt, 2, int(m * std::abs(d.r)));
  auto phi_at = [&](double a) { return ev.phi(pt.with_alpha({j, m}, a), j, m, false); };
  std::vector<double> al(samples), ph(samples);
  Eigen::MatrixXd A(samples, 3);
  Eigen::VectorXd b(samples);
  for (int k = 0; k < samples; ++k) {
    al[k] = kPi * k / samples;
    ph[k] = phi_at(al[k]);
    A.row(k) << 1.0, std::cos(2 * al[k]), std::sin(2 * al[k]);
    b(k) = ph[k];
  }
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
  f.offset = x(0);
  f.fitted_cos = x(1);
  f.fitted_sin = x(2);
  f.residual = (A * x - b).cwiseAbs().maxCoeff();
  if (samples % 2 == 0) {
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < samples / 2; ++k) {
      const double s = ph[k] + ph[k + samples / 2];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    f.d_spread = hi - lo;
  }
  const double a0 = pt.alpha({j, m});
  f.D = 0.5 * (phi_at(a0) + phi_at(a0 + kPi / 2));
  return f;
}

std::complex<double> b_transform(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, double alpha_jm, int n,
                                 int N, double h) {
  if (j > 2 || m < 2) throw OutOfRange("b coefficients are defined for E1 indices");
  const auto L = ev.cache().get(pt.eps[j - 1] * pt.base_gap({j, 1}), std::max(pt.I(j), m));
  std::vector<double> phi, dphi;
  e1_phi(*L, m, alpha_jm, N, h, phi, &dphi);
  std::complex<double> acc = 0;
  for (int k = 0; k < N; ++k) acc += std::polar(1.0, 2.0 * kPi * n * double(k) / N) * dphi[k];
  return acc / double(N);
}

double b_coeff(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, int n, double alpha3n) {
  const auto F = b_transform(ev, pt, j, m, pt.alpha({j, m}), n);
  return (std::polar(1.0, 2.0 * alpha3n) * F).real();
}

double b_coeff(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, int n) {
  return b_coeff(ev, pt, j, m, n, pt.alpha({3, n}));
}

MixedDerivative mixed_derivative(InvariantEvaluator& ev, const ManifoldPoint& pt, int j, int m, const MixedOptions& opt) {
  if (j < 1 || j > 2 || m < 2) throw OutOfRange("mixed derivative is defined for E1 indices");
  if (pt.eps[2] != 0 || pt.eps[3] != 0) throw OutOfRange("mixed derivative is evaluated at eps0");
  const int l = 3 - j;
  MixedDerivative r;
  r.coupling = coupling(pt, 3, l, j);
  double sum = 0;
  for (int n = 1; n <= pt.I(3); ++n)
    sum += pt.base_gap({3, n}) * lame_coefficient(ev, pt, l, n) * b_coeff(ev, pt, j, m, n);
  r.normalized = 2.0 * sum;
  r.method_a = r.coupling * r.normalized;
  r.leading = 2.0 * lame_coefficient(ev, pt, l, m) * pt.base_gap({3, m}) *
              std::sin(2.0 * pt.alpha({3, m}) - 2.0 * pt.alpha({j, m}));

  const Coord c{j, m};
  const double a0 = pt.alpha(c);
  auto phi = [&](double e3, double a) { return ev.phi(pt.with_eps(3, e3).with_alpha(c, a), j, m, false); };
  auto stencil = [&](double h, double k) {
    return (phi(h, a0 + k) - phi(h, a0 - k) - phi(-h, a0 + k) + phi(-h, a0 - k)) / (4.0 * h * k);
  };
  const double h = opt.eps3_step, k = opt.alpha_step;
  r.method_b = (4.0 * stencil(h / 2, k) - stencil(h, k)) / 3.0;
  r.discrepancy = std::abs(r.method_a - r.method_b);
  if (opt.throw_on_disagree && r.discrepancy > 1e-4 * std::max(1.0, std::abs(r.method_a))) {
    std::ostringstream os;
    os << "mixed derivative (" << j << "," << m << "): quadrature " << r.method_a << " vs differences " << r.method_b;
    throw MethodsDisagree(os.str());
  }
  return r;
}

bool EpsilonSelection::all_positive() const {
  return std::all_of(certificate.begin(), certificate.end(), [](const Slack& s) { return s.value > 0; });
}

namespace {

std::vector<double> alpha_grid(int n) {
  std::vector<double> a(n);
  for (int k = 0; k < n; ++k) a[k] = kPi * (k + 0.5) / n;
  return a;
}

ManifoldPoint at_eps0(const ManifoldPoint& base, double e1, double e2) {
  ManifoldPoint p = base;
  p.eps = {e1, e2, 0.0, 0.0};
  return p;
}

std::vector<Slack> choicetwo_slacks(InvariantEvaluator& ev, double beta, const ManifoldPoint& pt,
                                    const SelectionOptions& opt) {
  std::vector<Slack> out;
  for (int m = 2; m <= pt.I(2); ++m) {
    if (!(pt.base_gap({3, m}) > 0)) continue;
    double worst = 0;
    // sup over alpha_{3,m} of |b - sin(2a3 - 2a2)| = |F + i e^{-2 i a2}|
    for (double a : alpha_grid(opt.alpha_samples)) {
      const auto F = b_transform(ev, pt, 2, m, a, m, opt.N);
      worst = std::max(worst, std::abs(F + std::complex<double>(0, 1) * std::polar(1.0, -2.0 * a)));
    }
    out.push_back({"choicetwo m=" + std::to_string(m), std::sin(beta) - worst});
  }
  return out;
}

std::vector<Slack> eps1_slacks(InvariantEvaluator& ev, double beta, const ManifoldPoint& pt,
                               const SelectionOptions& opt) {
  std::vector<Slack> out;
  const int I3 = pt.I(3);
  // (choiceone)
  for (int m = 2; m <= pt.I(1); ++m) {
    if (!(pt.base_gap({3, m}) > 0)) continue;
    const auto L = ev.cache().get(pt.eps[0] * pt.base_gap({1, 1}), pt.I(1));
    double M = 0;
    for (double a : alpha_grid(opt.alpha_samples)) {
      std::vector<double> phi, dphi;
      e1_phi(*L, m, a, opt.N, 1e-5, phi, &dphi);
      for (double v : dphi) M = std::max(M, std::abs(v));
    }
    const double rhs = std::abs(lame_coefficient(ev, pt, 2, m)) * pt.base_gap({3, m}) * std::sin(beta) / (2.0 * I3);
    out.push_back({"choiceone m=" + std::to_string(m), rhs - (M + 2.0) * pt.eps[0]});
  }
  // (choice)
  for (int m = 2; m <= pt.I(2); ++m) {
    const auto grid = alpha_grid(opt.alpha_samples);
    std::vector<std::vector<std::complex<double>>> F(I3 + 1);
    for (int n = 1; n <= I3; ++n)
      for (double a : grid) F[n].push_back(b_transform(ev, pt, 2, m, a, n, opt.N));
    double slack = 1e300;
    bool any = false;
    for (int n = 1; n <= I3; ++n) {
      double fmax = 0;
      size_t arg = 0;
      for (size_t i = 0; i < grid.size(); ++i)
        if (std::abs(F[n][i]) > fmax) fmax = std::abs(F[n][i]), arg = i;
      if (fmax < 1e-12) continue;  // identically zero in alpha
      any = true;
      const double a3n = -0.5 * std::arg(F[n][arg]);  // maximizes Re(e^{2i a3n} F)
      const double lhs = pt.base_gap({3, n}) * std::abs(lame_coefficient(ev, pt, 1, n)) * fmax;
      double rhs = 0;
      for (int k = n + 1; k <= I3; ++k) {
        const double a3k = pt.alpha({3, k});
        (void)a3n;
        rhs += pt.base_gap({3, k}) * lame_coefficient(ev, pt, 1, k) * (std::polar(1.0, 2.0 * a3k) * F[k][arg]).real();
      }
      slack = std::min(slack, lhs - std::abs(rhs));
    }
    if (any) out.push_back({"choice m=" + std::to_string(m), slack});
  }
  return out;
}

std::vector<double> log_grid(const SelectionOptions& opt) {
  std::vector<double> g;
  for (int k = 0;; ++k) {
    const double e = std::pow(10.0, -double(k) / opt.per_decade);
    if (e < opt.eps_min * (1 - 1e-12)) break;
    g.push_back(e);
  }
  return g;
}

}  // namespace

std::vector<Slack> selection_slacks(InvariantEvaluator& ev, double beta, const ManifoldPoint& base, double eps1,
                                    double eps2, const SelectionOptions& opt) {
  const auto pt = at_eps0(base, eps1, eps2);
  auto s = choicetwo_slacks(ev, beta, pt, opt);
  auto t = eps1_slacks(ev, beta, pt, opt);
  s.insert(s.end(), t.begin(), t.end());
  return s;
}

EpsilonSelection select_epsilons(InvariantEvaluator& ev, double beta, const ManifoldPoint& base,
                                 const SelectionOptions& opt) {
  if (!(beta > 0 && beta < 1)) throw OutOfRange("beta must lie in (0,1)");
  const auto grid = log_grid(opt);
  auto positive = [](const std::vector<Slack>& v) {
    return std::all_of(v.begin(), v.end(), [](const Slack& s) { return s.value > 0; });
  };
  EpsilonSelection sel;
  bool found2 = false;
  for (double e2 : grid)
    if (positive(choicetwo_slacks(ev, beta, at_eps0(base, 1.0, e2), opt))) {
      sel.eps2 = e2;
      found2 = true;
      break;
    }
  if (!found2) throw NoFeasibleEpsilon("no eps2 on the grid satisfies eps2 |C| < sin(beta)");
  bool found1 = false;
  for (double e1 : grid)
    if (positive(eps1_slacks(ev, beta, at_eps0(base, e1, sel.eps2), opt))) {
      sel.eps1 = e1;
      found1 = true;
      break;
    }
  if (!found1) throw NoFeasibleEpsilon("no eps1 on the grid satisfies (choiceone) and (choice)");
  sel.certificate = selection_slacks(ev, beta, base, sel.eps1, sel.eps2, opt);
  return sel;
}

}  // namespace floquet
