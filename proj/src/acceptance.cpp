#include "floquet/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "floquet/config.hpp"
#include "floquet/errors.hpp"
#include "floquet/finitegap.hpp"
#include "floquet/hill.hpp"
#include "floquet/invariants.hpp"
#include "floquet/jacobian.hpp"
#include "floquet/weierstrass.hpp"

namespace floquet {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

Potential1D lame(double tau) { return one_gap_potential(make_wp_params(tau)); }
// 6 wp(s + 0.13 + i/2): two open gaps
Potential1D two_gap() { return lame(1.0).scaled(3.0).translated(0.13); }

struct Context {
  AcceptanceOptions opt;
  std::vector<std::pair<std::string, Spectrum1D>> spectra;
  std::vector<std::string> spectrum_errors;
  InvariantEvaluator ev;
  std::optional<EpsilonSelection> selection;
  ManifoldPoint base;

  explicit Context(const AcceptanceOptions& o) : opt(o), ev(o.grid), base(make_point(default_config())) {}

  Spectrum1D spectrum(const std::string& name, const Potential1D& q, int m_max) {
    try {
      auto s = full_spectrum(q, m_max);
      spectra.emplace_back(name, s);
      return s;
    } catch (const InterlacingViolation& e) {
      spectrum_errors.push_back(name + ": " + e.what());
      throw;
    }
  }

  const EpsilonSelection& select() {
    if (!selection) selection = select_epsilons(ev, default_config().beta, base);
    return *selection;
  }
};

// ---- 1 ------------------------------------------------------------------
void zero_potential(Context& c, CriterionResult& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = c.spectrum("zero", Potential1D::zero(), 10);
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0;
  for (int m = 1; m <= 10; ++m) {
    const double e = m * m * kPi * kPi;
    const auto& g = s.gap(m);
    for (double v : {g.minus, g.plus, g.mu}) worst = std::max(worst, std::abs(v - e) / e);
  }
  r.pass = std::abs(s.lambda0) < 1e-8 && worst < 1e-8 && sec < 5.0;
  r.detail = "|lambda0| " + sci(std::abs(s.lambda0)) + ", max rel error " + sci(worst) + " (< 1e-8), spectrum in " +
             sci(sec) + " s (< 5)";
}

// ---- 3 ------------------------------------------------------------------
void galerkin_equivalence(Context& c, CriterionResult& r) {
  const std::vector<std::pair<std::string, Potential1D>> qs{
      {"zero", Potential1D::zero()}, {"2cos", Potential1D::cosine(2.0, 1)}, {"wp tau=1", lame(1.0)}, {"wp tau=2", lame(2.0)}};
  double worst = 0;
  std::string where;
  for (const auto& [name, q] : qs) {
    const auto s = c.spectrum(name, q, 10);
    std::vector<double> per{s.lambda0}, anti, dir;
    for (int m = 1; m <= 10; ++m) {
      auto& v = (m % 2 == 0) ? per : anti;
      v.push_back(s.gap(m).minus);
      v.push_back(s.gap(m).plus);
      dir.push_back(s.gap(m).mu);
    }
    const std::vector<std::pair<Sector, const std::vector<double>*>> sectors{
        {Sector::periodic, &per}, {Sector::antiperiodic, &anti}, {Sector::dirichlet, &dir}};
    for (const auto& [sec, v] : sectors) {
      const auto g = galerkin_oracle(q, 32, sec);
      for (size_t i = 0; i < v->size(); ++i) {
        const double e = rel((*v)[i], g.at(i));
        if (e > worst) worst = e, where = name;
      }
    }
  }
  r.pass = worst < 1e-6;
  r.detail = "max rel difference " + sci(worst) + " (" + where + ", < 1e-6) over periodic, antiperiodic, Dirichlet, m <= 10";
}

// ---- 4 ------------------------------------------------------------------
void one_gap(Context& c, CriterionResult& r) {
  const auto p = make_wp_params(1.0);
  const auto s = c.spectrum("wp tau=1 m<=8", one_gap_potential(p), 8);
  const auto e = band_edges(p);
  double closed = 0;
  for (int m = 2; m <= 8; ++m) closed = std::max(closed, s.gap(m).gamma);
  const double edge = std::max({std::abs(s.lambda0 - e.lambda0), std::abs(s.gap(1).minus - e.lambda1_minus),
                                std::abs(s.gap(1).plus - e.lambda1_plus)});
  double trip = 0;
  for (double tau : {0.5, 1.0, 2.0, 3.0}) trip = std::max(trip, std::abs(tau_from_gap(gap_of_tau(tau)).tau - tau));
  r.pass = s.gap(1).gamma > 1e-6 && closed < 1e-6 && edge < 1e-6 && trip < 1e-8;
  r.detail = "gap 1 = " + sci(s.gap(1).gamma) + ", max gap m=2..8 " + sci(closed) + " (< 1e-6), edge error " + sci(edge) +
             " (< 1e-6), tau round trip " + sci(trip) + " (< 1e-8)";
}

// ---- 5 ------------------------------------------------------------------
void discriminant_product(Context& c, CriterionResult& r) {
  double worst = 0;
  for (const auto& [name, q] : std::vector<std::pair<std::string, Potential1D>>{{"one-gap", lame(1.0)}, {"two-gap", two_gap()}}) {
    const auto s = c.spectrum(name + " m<=30", q, 30);
    const double a = s.lambda0, b = s.gap(10).plus;
    for (int k = 0; k < 50; ++k) {
      const double lam = a + (k + 0.5) / 50.0 * (b - a);
      const double d = discriminant(q, lam);
      const double shoot = d * d - 4.0;
      const auto prod = discriminant_product_ratio(s, lam, 30);
      worst = std::max(worst, std::abs(prod.value - shoot) / std::abs(shoot));
    }
  }
  r.pass = worst < 1e-4;
  r.detail = "max rel difference " + sci(worst) + " on 2 x 50 samples in [lambda0, lambda10+] (< 1e-4)";
}

// ---- 6 ------------------------------------------------------------------
void isospectral_flow(Context& c, CriterionResult& r) {
  const auto q = two_gap();
  const auto s = c.spectrum("two-gap m<=4", q, 4);
  const auto data = FiniteGapData::from_spectrum(s);
  const auto start = torus_point_from_spectrum(data, s);
  const auto grid16 = uniform_grid(16);
  const auto fl = mu_flow(data, start, grid16);
  int mtop = 0;
  for (const auto& g : data.gaps) mtop = std::max(mtop, g.m);
  double mu_err = 0;
  for (int k = 0; k < 16; ++k) {
    const auto mu = dirichlet_spectrum(q.translated(grid16[k]), mtop);
    for (size_t i = 0; i < data.gaps.size(); ++i)
      mu_err = std::max(mu_err, std::abs(mu[data.gaps[i].m - 1] - fl.mu[i][k]));
  }
  const int Nf = 128;
  const auto rq = reconstruct_potential(data, mu_flow(data, start, uniform_grid(Nf)));
  double mean = 0;
  for (double v : rq) mean += v / Nf;
  const auto Q = Potential1D::from_samples(rq);
  double spec_err = 0;
  for (int k = 0; k < 16; ++k) {
    const auto t = c.spectrum("reconstructed s=" + std::to_string(k), Q.translated(grid16[k]), 4);
    spec_err = std::max(spec_err, std::abs(t.lambda0 + mean - s.lambda0));
    for (int m = 1; m <= 4; ++m)
      spec_err = std::max({spec_err, std::abs(t.gap(m).minus + mean - s.gap(m).minus),
                           std::abs(t.gap(m).plus + mean - s.gap(m).plus)});
  }
  r.pass = mu_err < 1e-6 && spec_err < 1e-6;
  r.detail = "reconstructed spectra vs input " + sci(spec_err) + ", mu-flow vs Dirichlet of translates " + sci(mu_err) +
             " (both < 1e-6, 16 shifts)";
}

// ---- 7 ------------------------------------------------------------------
std::vector<double> spectral_derivative(const std::vector<double>& f, int order) {
  const int N = int(f.size());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> F;
  fft.fwd(F, f);
  for (int k = 0; k < N; ++k) {
    const int kk = (k <= N / 2) ? k : k - N;
    std::complex<double> w = std::pow(std::complex<double>(0, 2 * kPi * kk), order);
    if (k == N / 2 && order % 2 == 1) w = 0;
    F[k] *= w;
  }
  std::vector<std::complex<double>> g;
  fft.inv(g, F);
  std::vector<double> out(N);
  for (int k = 0; k < N; ++k) out[k] = g[k].real();
  return out;
}

void squared_eigenfunctions(Context& c, CriterionResult& r) {
  double res = 0, norm = 0, der = 0;
  for (const auto& q : {lame(1.0), two_gap()}) {
    const auto s = c.spectrum("eigenfunction potential", q, 4);
    const auto data = FiniteGapData::from_spectrum(s);
    const auto start = torus_point_from_spectrum(data, s);
    const int N = 256;
    const auto grid = uniform_grid(N);
    const auto fl = mu_flow(data, start, grid);
    for (const auto& g : data.gaps) {
      const auto sq = eigenfunction_sq(data, g.m, fl);
      const auto& f = sq.values;
      const auto f1 = spectral_derivative(f, 1), f2 = spectral_derivative(f, 2);
      // y^2 = f with -y'' + q y = lambda y  =>  2 f f'' - f'^2 = 4 (q - lambda) f^2
      double worst = 0, scale = 0;
      for (int k = 0; k < N; ++k) {
        const double a = 2 * f[k] * f2[k], b = f1[k] * f1[k], d = 4 * (q.value(grid[k]) - g.plus) * f[k] * f[k];
        worst = std::max(worst, std::abs(a - b - d));
        scale = std::max({scale, std::abs(a), std::abs(b), std::abs(d)});
      }
      res = std::max(res, worst / scale);
      norm = std::max(norm, std::abs(sq.norm - 1.0));
      const auto ds = eigenfunction_sq_ds(data, g.m, fl, sq);
      const double h = 1e-5;
      double dmax = 0, derr = 0;
      for (double v : ds) dmax = std::max(dmax, std::abs(v));
      for (int k = 8; k < N; k += 31) {
        const auto fl2 = mu_flow(data, start, {grid[k] - h, grid[k] + h});
        const auto sq2 = eigenfunction_sq(data, g.m, fl2);
        const double fd = (sq2.values[1] - sq2.values[0]) * sq2.norm / (2 * h) / sq.norm;
        derr = std::max(derr, std::abs(fd - ds[k]));
      }
      der = std::max(der, derr / dmax);
    }
  }
  r.pass = res < 1e-5 && norm < 1e-8 && der < 1e-5;
  r.detail = "ODE residual " + sci(res) + " (< 1e-5), |mean - 1| " + sci(norm) + " (< 1e-8), d/ds vs differences " +
             sci(der) + " (< 1e-5)";
}

// ---- 8 ------------------------------------------------------------------
void lemma_one(Context& c, CriterionResult& r) {
  const double gap = c.base.eps[0] * c.base.base_gap({1, 1});
  const auto L = c.ev.cache().get(gap, 3);
  double worst = 0;
  for (double s : {0.17, 0.5, 0.83}) {
    const TorusPoint start{L->alpha1, 0.3, 1.1};
    const auto S = alpha_tilde_sensitivity(L->limit, start, s, {0, 1, 2});
    // closed levels move with their own coordinate and alpha_1 only; gap 1 ignores them
    Eigen::Matrix2d block = S.bottomRightCorner(2, 2) - Eigen::Matrix2d::Identity();
    worst = std::max({worst, block.cwiseAbs().maxCoeff(), S.row(0).tail(2).cwiseAbs().maxCoeff()});
  }
  r.pass = worst < 1e-7;
  r.detail = "max |S - I| over closed levels " + sci(worst) + " (< 1e-7) at s = 0.17, 0.5, 0.83";
}

// ---- 9 ------------------------------------------------------------------
void closed_form(Context& c, CriterionResult& r) {
  const auto t0 = std::chrono::steady_clock::now();
  double res = 0, amp = 0;
  for (int j = 3; j <= c.base.S(); ++j)
    for (int m = 1; m <= c.base.I(j); ++m) {
      const auto f = phi_limit_closed_form(c.ev, c.base, j, m);
      res = std::max(res, f.residual);
      amp = std::max(amp, std::abs(f.fitted_cos - f.formula) / std::abs(f.formula) + std::abs(f.fitted_sin) / std::abs(f.formula));
    }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = res < 1e-6 && amp < 1e-4 && sec < 60;
  r.detail = "fit residual " + sci(res) + " (< 1e-6), amplitude rel error " + sci(amp) + " (< 1e-4), " + sci(sec) +
             " s at " + std::to_string(c.opt.grid) + "^2 (< 60)";
}

// ---- 10 -----------------------------------------------------------------
void structure(Context& c, CriterionResult& r) {
  try {
    const auto s = structure_at_eps0(c.ev, c.base);
    r.pass = s.zero_column_ratio < 1e-6 && s.off_pattern < 1e-5 && s.jac.rank == s.expected_rank;
    r.detail = "max |v_i|/max|J| for i <= n " + sci(s.zero_column_ratio) + " (< 1e-6), off-pattern " + sci(s.off_pattern) +
               " (< 1e-5), rank " + std::to_string(s.jac.rank) + " (expected " + std::to_string(s.expected_rank) + ")";
  } catch (const PatternViolation& e) {
    r.detail = e.what();
  }
}

// ---- 11 -----------------------------------------------------------------
ManifoldPoint three_gap_point() {
  auto cfg = default_config();
  cfg.gaps = {{8.0, 1.0, 1.0}, {8.0, 1.0, 1.0}, {1.0, 0.8, 0.6}, {0.5, 0.5, 0.5}};
  cfg.alpha = {{0.0, 0.41, 0.77}, {0.0, 0.93, 0.29}, {0.27, 1.13, 0.52}, {0.61, 0.35, 1.02}};
  return make_point(cfg);
}

void appendix_b(Context& c, CriterionResult& r) {
  const auto& sel = c.select();
  ManifoldPoint p = c.base;
  p.eps = {sel.eps1, sel.eps2, 0.0, 0.0};
  double mix = 0, bdiff = 0;
  try {
    for (int m = 2; m <= p.I(1); ++m) {
      const auto d = mixed_derivative(c.ev, p, 1, m);
      mix = std::max(mix, std::abs(d.normalized - d.leading));
    }
  } catch (const MethodsDisagree& e) {
    r.detail = e.what();
    return;
  }
  for (int m = 2; m <= p.I(2); ++m)
    bdiff = std::max(bdiff, std::abs(b_coeff(c.ev, p, 2, m, m) - std::sin(2 * p.alpha({3, m}) - 2 * p.alpha({2, m}))));

  const auto q = three_gap_point();
  const std::vector<double> eps{0.02, 0.04, 0.08};
  double slope_err = 0;
  std::string where;
  for (int j = 1; j <= 2; ++j)
    for (int m = 2; m <= q.I(j); ++m)
      for (int n = 1; n <= q.I(3); ++n) {
        const int k = std::abs(m - n);
        if (k > 2) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double e : eps) {
          const auto pt = q.with_eps(j, e);
          const double x = std::log(e), y = std::log(std::abs(b_transform(c.ev, pt, j, m, pt.alpha({j, m}), n)));
          sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
        if (std::abs(slope - k) > slope_err) {
          slope_err = std::abs(slope - k);
          where = "(" + std::to_string(j) + "," + std::to_string(m) + "," + std::to_string(n) + ")";
        }
      }
  r.pass = mix < 10 * sel.eps1 && bdiff < 10 * sel.eps2 && slope_err <= 0.3;
  r.detail = "at eps1=" + sci(sel.eps1) + ", eps2=" + sci(sel.eps2) + ": mixed derivative vs sine " + sci(mix) +
             " (< 10 eps1), b_{2,m,m} vs sine " + sci(bdiff) + " (< 10 eps2), worst b slope deviation " + sci(slope_err) +
             " at " + where + " (<= 0.3)";
}

// ---- 12 -----------------------------------------------------------------
void rigidity(Context& c, CriterionResult& r) {
  const auto& sel = c.select();
  ManifoldPoint p = c.base;
  p.eps = {sel.eps1, sel.eps2, 0.0, 0.0};
  ScanSpecification spec;
  spec.eps3 = {0.05, 0.1, 0.2, 0.3};
  spec.eps4 = {0.0};
  spec.threads = c.opt.threads;
  const auto res = rigidity_scan(c.ev, p, spec);
  int deg3 = 0, deg3c = 0, degx = 0, degxc = 0;
  const auto samples = scan_alpha_samples(p, spec);
  for (const auto& cell : res.cells) {
    if (!cell.degenerate) continue;
    // which j >= 3 entry is degenerate in this sample
    int jd = 0;
    for (const auto& co : p.E0c())
      if (co.j >= 3 && samples[cell.alpha_id].first.alpha(co) != samples[0].first.alpha(co)) jd = co.j;
    if (jd == 3) ++deg3, deg3c += cell.certified;
    else ++degx, degxc += cell.certified;
  }
  r.pass = sel.all_positive() && res.failures == 0 && res.certified_fraction_generic >= 0.9 && res.degenerate_certified == 0;
  std::ostringstream os;
  os << "slacks " << (sel.all_positive() ? "positive" : "NOT positive") << ", generic cells certified "
     << res.certified_fraction_generic * 100 << "% (>= 90%), degenerate cells certified: " << deg3c << "/" << deg3
     << " with alpha_{3,m} = 0 mod pi/2, " << degxc << "/" << degx << " with alpha_{j,m} = 0 mod pi/2 for j > 3 (need 0)";
  if (res.failures) os << ", " << res.failures << " failed cells";
  r.detail = os.str();
}

// ---- 2 ------------------------------------------------------------------
void interlacing(Context& c, CriterionResult& r) {
  // the suite's own spectra plus the Lame directions of the default point
  for (double g : {4.0, 8.0, 0.08}) c.spectrum("lame gap " + sci(g), c.ev.cache().get(g, 3)->q, 10);
  int bad = 0;
  std::string first;
  for (const auto& [name, s] : c.spectra) {
    const auto v = interlacing_violations(s, 1e-9);
    bad += int(v.size());
    if (!v.empty() && first.empty()) first = name + ": " + v[0];
  }
  bad += int(c.spectrum_errors.size());
  if (first.empty() && !c.spectrum_errors.empty()) first = c.spectrum_errors[0];
  r.pass = bad == 0;
  r.detail = std::to_string(bad) + " violations over " + std::to_string(c.spectra.size()) + " spectra" +
             (first.empty() ? "" : "; first: " + first);
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  Context ctx(opt);
  const std::vector<std::pair<std::string, std::function<void(Context&, CriterionResult&)>>> all{
      {"zero-potential spectra", zero_potential},
      {"interlacing", interlacing},
      {"shooting vs Galerkin", galerkin_equivalence},
      {"one-gap certification", one_gap},
      {"discriminant product", discriminant_product},
      {"isospectral flow", isospectral_flow},
      {"squared eigenfunctions", squared_eigenfunctions},
      {"sensitivity at eps0", lemma_one},
      {"closed-form invariants", closed_form},
      {"Jacobian structure at eps0", structure},
      {"mixed derivatives and b coefficients", appendix_b},
      {"rigidity scan", rigidity}};
  auto wanted = [&](int id) { return opt.only.empty() || std::count(opt.only.begin(), opt.only.end(), id); };
  std::vector<CriterionResult> out(all.size());
  // interlacing runs last so that it sees every spectrum of the suite
  std::vector<int> order{1, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 2};
  for (int id : order) {
    auto& r = out[id - 1];
    r.id = id;
    r.title = all[id - 1].first;
    if (!wanted(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      all[id - 1].second(ctx, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::vector<CriterionResult> kept;
  for (auto& r : out)
    if (wanted(r.id)) kept.push_back(r);
  return kept;
}

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "criterion %2d %s  ", r.id, r.pass ? "PASS" : "FAIL");
  char tail[32];
  std::snprintf(tail, sizeof tail, " (%.2f s)", r.seconds);
  return std::string(head) + r.title + ": " + r.detail + tail;
}

}  // namespace floquet
