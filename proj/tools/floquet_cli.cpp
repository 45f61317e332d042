// floquet: spectra, flows, invariants and rigidity scans from a JSON config.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <utility>

#include "CLI11.hpp"
#include "floquet/acceptance.hpp"
#include "floquet/config.hpp"
#include "floquet/errors.hpp"
#include "floquet/finitegap.hpp"
#include "floquet/hill.hpp"
#include "floquet/invariants.hpp"
#include "floquet/jacobian.hpp"

using namespace floquet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kConfigError = 1, kVerifyFailed = 2;

struct Run {
  ExperimentConfig cfg;
  std::string hash;
  fs::path out;
  int threads = 1;

  std::string path(const std::string& name) const { return (out / name).string(); }
  void write_json(const std::string& name, json j) const {
    j["config_hash"] = hash;
    std::ofstream(path(name)) << j.dump(2) << "\n";
  }
};

int cmd_spectrum(const Run& run) {
  const auto q = make_potential(run.cfg.potential);
  HillOptions opt;
  opt.ode_tol = run.cfg.tol.ode;
  opt.root_tol = run.cfg.tol.root;
  opt.gap_tol = run.cfg.tol.gap;
  Spectrum1D s;
  try {
    s = full_spectrum(q, run.cfg.m_max, opt);
  } catch (const InterlacingViolation& e) {
    std::cerr << "interlacing violation: " << e.what() << "\n";
    return kVerifyFailed;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvWriter w(run.path("spectrum.csv"), {"m", "lambda_minus", "lambda_plus", "mu", "gamma", "lambda_dot", "open_flag"},
              run.hash);
  w.row({0.0, s.lambda0, s.lambda0, nan, 0.0, nan, 0.0});
  for (const auto& g : s.gaps) w.row({double(g.m), g.minus, g.plus, g.mu, g.gamma, g.critical, g.open ? 1.0 : 0.0});
  std::printf("lambda0 %.12g, open gaps:", s.lambda0);
  for (int m : s.open_set()) std::printf(" %d", m);
  std::printf("\n");
  return kOk;
}

int cmd_flow(const Run& run) {
  const auto q = make_potential(run.cfg.potential);
  const int m_max = std::max(run.cfg.m_max, 1);
  const auto s = full_spectrum(q, m_max);
  const auto data = FiniteGapData::from_spectrum(s);
  const auto start = torus_point_from_spectrum(data, s);
  FlowOptions fo;
  fo.tol = run.cfg.tol.flow;
  const auto grid = uniform_grid(run.cfg.flow_samples);
  const auto fl = mu_flow(data, start, grid, fo);
  const auto rq = reconstruct_potential(data, fl);

  std::vector<std::string> cols{"s"};
  for (const auto& g : data.gaps) cols.push_back("mu_" + std::to_string(g.m));
  for (const auto& g : data.gaps) cols.push_back("alpha_" + std::to_string(g.m));
  cols.push_back("q_reconstructed");
  cols.push_back("q");
  CsvWriter w(run.path("flow.csv"), cols, run.hash);
  for (size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row{grid[k]};
    for (size_t i = 0; i < data.gaps.size(); ++i) row.push_back(fl.mu[i][k]);
    for (size_t i = 0; i < data.gaps.size(); ++i) row.push_back(fl.theta[i][k]);
    row.push_back(rq[k]);
    row.push_back(q.value(grid[k]));
    w.row(row);
  }

  // isospectrality of the reconstructed potential
  const int Nf = 128;
  const auto fine = reconstruct_potential(data, mu_flow(data, start, uniform_grid(Nf), fo));
  double mean = 0;
  for (double v : fine) mean += v / Nf;
  const auto t = full_spectrum(Potential1D::from_samples(fine), m_max);
  double drift = std::abs(t.lambda0 + mean - s.lambda0);
  for (int m = 1; m <= m_max; ++m)
    drift = std::max({drift, std::abs(t.gap(m).minus + mean - s.gap(m).minus), std::abs(t.gap(m).plus + mean - s.gap(m).plus)});
  run.write_json("flow_summary.json", {{"open_gaps", data.gaps.size()}, {"isospectral_drift", drift}});
  std::printf("open gaps %zu, isospectral drift %.3e\n", data.gaps.size(), drift);
  return drift > 1e-6 ? kVerifyFailed : kOk;
}

bool at_eps0(const ManifoldPoint& p) { return p.eps[2] == 0 && p.eps[3] == 0; }

int cmd_invariants(const Run& run) {
  const auto pt = make_point(run.cfg);
  InvariantEvaluator ev(run.cfg.grid, run.cfg.tol.quad);
  const auto v = ev.invariant_vector(pt, true);
  CsvWriter w(run.path("invariants.csv"), {"i", "j", "m", "phi", "doubling_change"}, run.hash);
  json summary{{"phi", json::array()}, {"doubling_change", v.doubling_change}};
  for (size_t i = 0; i < v.index.size(); ++i) {
    w.row({double(i + 1), double(v.index[i].j), double(v.index[i].m), v.phi(i), v.doubling_change});
    summary["phi"].push_back({{"j", v.index[i].j}, {"m", v.index[i].m}, {"value", v.phi(i)}});
  }
  if (at_eps0(pt)) {
    CsvWriter cf(run.path("closed_form.csv"), {"j", "m", "formula", "fitted_cos", "fitted_sin", "residual", "D"}, run.hash);
    for (int j = 3; j <= pt.S(); ++j)
      for (int m = 1; m <= pt.I(j); ++m) {
        const auto f = phi_limit_closed_form(ev, pt, j, m);
        cf.row({double(j), double(m), f.formula, f.fitted_cos, f.fitted_sin, f.residual, f.D});
      }
    CsvWriter bw(run.path("b_coefficients.csv"), {"j", "m", "n", "b"}, run.hash);
    for (const auto& c : pt.E1())
      for (int n = 1; n <= pt.I(3); ++n) bw.row({double(c.j), double(c.m), double(n), b_coeff(ev, pt, c.j, c.m, n)});
    CsvWriter mw(run.path("mixed.csv"), {"j", "m", "quadrature", "differences", "discrepancy", "normalized", "leading"},
                 run.hash);
    for (const auto& c : pt.E1()) {
      MixedOptions mo;
      mo.throw_on_disagree = false;
      const auto d = mixed_derivative(ev, pt, c.j, c.m, mo);
      mw.row({double(c.j), double(c.m), d.method_a, d.method_b, d.discrepancy, d.normalized, d.leading});
      if (d.discrepancy > 1e-4 * std::max(1.0, std::abs(d.method_a))) {
        std::cerr << "mixed derivative (" << c.j << "," << c.m << "): methods disagree by " << d.discrepancy << "\n";
        return kVerifyFailed;
      }
    }
  }
  run.write_json("invariants.json", summary);
  std::printf("%zu invariants, grid doubling change %.3e\n", v.index.size(), v.doubling_change);
  return kOk;
}

int cmd_jacobian(const Run& run) {
  const auto pt = make_point(run.cfg);
  InvariantEvaluator ev(run.cfg.grid, run.cfg.tol.quad);
  const auto an = jacobian(ev, pt, 0.0, JacobianMethod::Analytic);
  const auto fd = jacobian(ev, pt, 1e-4, JacobianMethod::FiniteDifference);
  CsvWriter w(run.path("jacobian.csv"), {"row_j", "row_m", "col_j", "col_m", "analytic", "differences", "noise"}, run.hash);
  double worst = 0;
  for (size_t r = 0; r < an.labels.size(); ++r)
    for (size_t c = 0; c < an.labels.size(); ++c) {
      w.row({double(an.labels[r].j), double(an.labels[r].m), double(an.labels[c].j), double(an.labels[c].m), an.J(r, c),
             fd.J(r, c), an.noise(r, c)});
      worst = std::max(worst, std::abs(an.J(r, c) - fd.J(r, c)) / (10.0 * (an.noise(r, c) + fd.noise(r, c)) + 1e-12));
    }
  json s{{"det", an.det},          {"det_noise", an.det_noise}, {"det_differences", fd.det}, {"cond", an.cond},
         {"rank", an.rank},        {"zero_columns", an.zero_columns}};
  if (at_eps0(pt)) {
    const auto rd = reduced_determinant(ev, pt);
    s["reduced_det"] = rd.direct;
    s["reduced_det_diagonal_product"] = rd.diagonal_product;
    try {
      const auto st = structure_at_eps0(ev, pt);
      s["off_pattern"] = st.off_pattern;
      s["expected_rank"] = st.expected_rank;
    } catch (const PatternViolation& e) {
      std::cerr << e.what() << "\n";
      run.write_json("jacobian.json", s);
      return kVerifyFailed;
    }
  }
  run.write_json("jacobian.json", s);
  std::printf("det %.6e (noise %.2e), rank %d of %zu\n", an.det, an.det_noise, an.rank, an.labels.size());
  if (worst > 1.0) {
    std::cerr << "analytic and finite-difference Jacobians disagree beyond 10x their noise\n";
    return kVerifyFailed;
  }
  return kOk;
}

int cmd_scan(const Run& run) {
  const auto base = make_point(run.cfg);
  InvariantEvaluator ev(run.cfg.grid, run.cfg.tol.quad);
  const auto sel = select_epsilons(ev, run.cfg.beta, base);
  ManifoldPoint p = base;
  p.eps = {sel.eps1, sel.eps2, 0.0, 0.0};
  ScanSpecification spec;
  spec.eps3 = run.cfg.scan.eps3;
  spec.eps4 = run.cfg.scan.eps4;
  spec.generic_alphas = run.cfg.scan.alpha_points;
  spec.seed = unsigned(run.cfg.scan.seed);
  spec.threads = run.threads;
  const auto res = rigidity_scan(ev, p, spec);
  CsvWriter w(run.path("scan.csv"), {"eps3", "eps4", "alpha_id", "degenerate", "abs_det", "noise_floor", "certified_flag"},
              run.hash);
  for (const auto& c : res.cells)
    w.row({c.eps3, c.eps4, double(c.alpha_id), c.degenerate ? 1.0 : 0.0, c.abs_det, c.noise_floor, c.certified ? 1.0 : 0.0});
  json slacks = json::array();
  for (const auto& s : sel.certificate) slacks.push_back({{"name", s.name}, {"value", s.value}});
  run.write_json("scan_summary.json", {{"eps1", sel.eps1},
                                       {"eps2", sel.eps2},
                                       {"slacks", slacks},
                                       {"certified_fraction_generic", res.certified_fraction_generic},
                                       {"degenerate_certified", res.degenerate_certified},
                                       {"failed_cells", res.failures}});
  std::printf("eps1 %.3g eps2 %.3g, generic cells certified %.1f%%, degenerate cells certified %d\n", sel.eps1, sel.eps2,
              100 * res.certified_fraction_generic, res.degenerate_certified);
  return kOk;
}

int cmd_selftest(const Run& run) {
  AcceptanceOptions opt;
  opt.grid = run.cfg.grid;
  opt.threads = run.threads;
  const auto results = run_acceptance(opt);
  std::ofstream log(run.path("selftest.txt"));
  bool ok = true;
  for (const auto& r : results) {
    const auto line = format_result(r);
    std::cout << line << "\n";
    log << line << "\n";
    ok = ok && r.pass;
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet spectra and rigidity experiments"};
  std::string config_path, out_dir;
  int grid = 0, threads = 1;
  double tol = 0;
  app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid", grid, "quadrature grid side (power of two)");
  app.add_option("--tol", tol, "quadrature tolerance");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  std::string which;
  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "periodic, antiperiodic and Dirichlet eigenvalues of the 1D potential"},
      {"flow", "isospectral flow of the Dirichlet data over one period"},
      {"invariants", "spectral invariants of the 2D potential and their closed forms"},
      {"jacobian", "Jacobian of the invariants in the phases, analytic and by differences"},
      {"scan", "rigidity scan over eps3, eps4 and phase samples"},
      {"selftest", "run the built-in acceptance checks"}};
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->fallthrough()->callback([&which, name = name] { which = name; });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  Run run;
  try {
    run.cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (grid) run.cfg.grid = grid;
    if (tol) run.cfg.tol.quad = tol;
    if (!out_dir.empty()) run.cfg.output_dir = out_dir;
    run.cfg = parse_config(run.cfg.to_json());  // revalidate overrides
    run.hash = config_hash(run.cfg);
    run.out = run.cfg.output_dir;
    run.threads = threads;
    fs::create_directories(run.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (which == "spectrum") return cmd_spectrum(run);
    if (which == "flow") return cmd_flow(run);
    if (which == "invariants") return cmd_invariants(run);
    if (which == "jacobian") return cmd_jacobian(run);
    if (which == "scan") return cmd_scan(run);
    return cmd_selftest(run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerifyFailed;
  }
}
