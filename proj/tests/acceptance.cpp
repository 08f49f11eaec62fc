// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// here in code.  `--level commit` runs the per-commit set; `--level nightly`
// adds the long vorticity rate sweep and its determinism rerun.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tnlab/experiments.hpp"
#include "tnlab/io.hpp"
#include "tnlab/props.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace tnlab;

namespace {

fs::path g_out_dir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int run_command(const std::string& cmd) {
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json transport_rate_config() {
  return json{{"equation", "transport"},
              {"d", 2},
              {"L", 2.0 * M_PI},
              {"N", 512},
              {"p", 1.5},
              {"alpha", 1.2},
              {"q", 2.0},
              {"T", 0.25},
              {"dt", 1e-3},
              {"ell_grid", {0.2, 0.141, 0.1, 0.071}},
              {"lambda", 1.0},
              {"samples", 64},
              {"seed", 20250801},
              {"noise_courant", 25.0},
              {"initial_data",
               {{"family", "singular"}, {"beta", 1.15}, {"radius", 1.0}}}};
}

json euler_rate_config() {
  return json{{"equation", "euler"},
              {"d", 2},
              {"L", 2.0 * M_PI},
              {"N", 512},
              {"p", 1.6},
              {"alpha", 0.6},
              {"q", 3.0},
              {"T", 0.25},
              {"dt", 1e-3},
              {"ell_grid", {0.2, 0.141, 0.1, 0.071}},
              {"lambda", 1.0},
              {"samples", 32},
              {"seed", 20250802},
              {"noise_courant", 25.0},
              {"initial_data",
               {{"family", "singular"}, {"beta", 1.1}, {"radius", 1.0}}}};
}

fs::path write_config(const std::string& name, const json& j) {
  fs::create_directories(g_out_dir);
  fs::path p = g_out_dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

// --------------------------------------------------------------------------
// C1: lattice kappa within [0.245, 0.255] for ell in {0.2, 0.1}, N = 256.
Outcome c1_kappa_identity() {
  std::ostringstream detail;
  bool pass = true;
  Grid grid(2, 2.0 * M_PI, 256);
  for (double ell : {0.2, 0.1}) {
    NoiseBasis basis = build_basis(kraichnan_spec(2, ell, 1.0), grid);
    detail << "ell=" << ell << " kappa_grid=" << basis.kappa_grid << "  ";
    pass = pass && basis.kappa_grid >= 0.245 && basis.kappa_grid <= 0.255;
  }
  return {pass, detail.str()};
}

// C2: quadrature slope of |g_ell|_3 over ell in {0.4,0.2,0.1,0.05} is 4/3
// within 1%.
Outcome c2_kraichnan_scaling() {
  const double r = 3.0;
  std::vector<double> ells = {0.4, 0.2, 0.1, 0.05};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double ell : ells) {
    double x = std::log(ell);
    double y = std::log(spectral_norm(kraichnan_spec(2, ell, 1.0), r));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double n = ells.size();
  double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  double target = 2.0 * (r - 1.0) / r;
  std::ostringstream detail;
  detail << "slope=" << slope << " target=" << target;
  return {std::abs(slope - target) <= 0.01 * target, detail.str()};
}

// C3: empirical covariance at x = y (M = 2000) within 5% of 2 kappa_grid I;
// spectral divergence <= 1e-10; discrete orthogonality <= 1e-10.
Outcome c3_noise_statistics() {
  Grid grid(2, 2.0 * M_PI, 128);
  NoiseBasis basis = build_basis(kraichnan_spec(2, 0.2, 1.0), grid);
  std::ostringstream detail;
  bool pass = true;

  auto est = empirical_covariance(basis, 2000, {0.0, 0.0}, 77001);
  double target = 2.0 * basis.kappa_grid;
  double cov_err = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      cov_err = std::max(cov_err,
                         std::abs(est.empirical[a][b] - (a == b ? target : 0.0)));
  detail << "cov_rel_err=" << cov_err / target;
  pass = pass && cov_err <= 0.05 * target;

  FourierWorkspace ws(grid);
  double div_worst = 0.0;
  for (std::uint32_t s = 0; s < 8; ++s)
    div_worst = std::max(
        div_worst, spectral_divergence(sample_increment(basis, 1e-3, {3, s, 0}), ws));
  detail << " div=" << div_worst;
  pass = pass && div_worst <= 1e-10;

  double ortho = 0.0, scale = 0.0;
  for (const auto& m : basis.modes) scale = std::max(scale, m.amp * m.amp);
  std::size_t stride = std::max<std::size_t>(1, basis.modes.size() / 24);
  for (std::size_t i = 0; i < basis.modes.size(); i += stride)
    for (std::size_t k = 0; k < basis.modes.size(); k += stride) {
      if (basis.modes[i].j == basis.modes[k].j) continue;
      auto cross = mode_overlap(basis, basis.modes[i].j, basis.modes[k].j);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) ortho = std::max(ortho, std::abs(cross[a][b]));
    }
  detail << " ortho=" << ortho / scale;
  pass = pass && ortho <= 1e-10 * scale;
  return {pass, detail.str()};
}

// C4: scheme-exact mild identity on a matrix of seeded transport paths.
Outcome c4_mild_identity() {
  std::ostringstream detail;
  double worst_rel = 0.0;
  for (int n : {64, 128}) {
    for (double ell : {0.2, 0.1}) {
      ExperimentConfig cfg;
      cfg.N = n;
      cfg.L = 2.0 * M_PI;
      cfg.p = 1.5;
      cfg.alpha = 1.2;
      cfg.T = 0.05;
      cfg.dt = 1e-3;
      cfg.ell_grid = {ell};
      cfg.samples = 2;
      cfg.seed = 515 + n;
      cfg.init.family = "singular";
      cfg.init.beta = 1.15;
      Grid grid = cfg.grid();
      NoiseBasis basis = build_basis(kraichnan_spec(2, ell, 1.0), grid);
      SolverConfig scfg;
      scfg.kappa = basis.kappa_grid;
      scfg.dt = cfg.dt;
      scfg.T = cfg.T;
      Stepper st(grid, scfg, &basis);
      SpectralField f0 = experiment_initial_hat(cfg, grid);
      double f0_l2 = detail::spectral_l2(f0);
      for (std::uint32_t s = 0; s < 2; ++s) {
        // run_path throws IdentityDefect beyond 1e-10 |f0|_2
        PathOutcome out = run_path(st, f0, cfg, s);
        worst_rel = std::max(worst_rel, out.max_defect / f0_l2);
      }
    }
  }
  detail << "max_defect_rel=" << worst_rel;
  return {worst_rel <= 1e-10, detail.str()};
}

// C5: L^p quasi-conservation with dt refinement.
Outcome c5_lp_conservation() {
  SuiteResult res = lp_conservation_suite(1.5, 128, 0.2, 0.15, 4e-3, 1e-3, 8, 11);
  std::ostringstream detail;
  for (const auto& [k, v] : res.metrics) detail << k << "=" << v << "  ";
  return {res.pass, detail.str()};
}

// C6: heat semigroup smoothing and continuity ratio suites.
Outcome c6_heat_semigroup() {
  SuiteResult a = heat_smoothing_suite(0.25, 100, 7);
  SuiteResult b = heat_continuity_suite(0.25, 100, 8);
  std::ostringstream detail;
  for (const auto& [k, v] : a.metrics) detail << "smooth." << k << "=" << v << "  ";
  for (const auto& [k, v] : b.metrics) detail << "cont." << k << "=" << v << "  ";
  return {a.pass && b.pass, detail.str()};
}

// C7: deterministic NSE a-priori bounds from singular L^p data.
Outcome c7_nse_apriori() {
  SuiteResult res = nse_apriori_suite(1.6, 256, 1.0, 2e-3, 0.25, 1.1, 1.0);
  std::ostringstream detail;
  for (const auto& [k, v] : res.metrics) detail << k << "=" << v << "  ";
  return {res.pass, detail.str()};
}

// C8: interpolation inequality battery.
Outcome c8_interpolation() {
  SuiteResult res = interpolation_suite(0.4, 0.8, 1.2, 1000, 9);
  std::ostringstream detail;
  for (const auto& [k, v] : res.metrics) detail << k << "=" << v << "  ";
  return {res.pass, detail.str()};
}

// C9: transport rate experiment via the CLI.
Outcome c9_transport_rate() {
  fs::path cfg = write_config("transport_rate.json", transport_rate_config());
  fs::path out = g_out_dir / "c9";
  int code = run_command(std::string(TNLAB_CLI_PATH) + " rate --config " +
                         cfg.string() + " --out " + out.string() + " --workers 2");
  if (code != 0) return {false, "CLI exit code " + std::to_string(code)};
  json fit = load_json_file((out / "fit.json").string());
  double slope = fit.at("slope").get<double>();
  double lo = fit.at("slope_ci").at(0).get<double>();
  double hi = fit.at("slope_ci").at(1).get<double>();
  bool monotone = fit.at("monotone_2sigma").get<bool>();
  double spread = fit.at("constant_spread").get<double>();
  std::ostringstream detail;
  detail << "slope=" << slope << " CI=[" << lo << "," << hi << "]"
         << " predicted=" << fit.at("predicted_exponent").get<double>()
         << " monotone=" << monotone << " spread=" << spread;
  bool pass = monotone && slope >= 0.5 * (2.0 / 3.0) && spread <= 10.0;
  return {pass, detail.str()};
}

// C10 (nightly): vorticity rate experiment via the CLI.
Outcome c10_euler_rate() {
  fs::path cfg = write_config("euler_rate.json", euler_rate_config());
  fs::path out = g_out_dir / "c10";
  int code = run_command(std::string(TNLAB_CLI_PATH) + " rate --config " +
                         cfg.string() + " --out " + out.string() + " --workers 2");
  if (code != 0) return {false, "CLI exit code " + std::to_string(code)};
  json fit = load_json_file((out / "fit.json").string());
  double slope = fit.at("slope").get<double>();
  double predicted = fit.at("predicted_exponent").get<double>();
  bool monotone = fit.at("monotone_2sigma").get<bool>();
  std::ostringstream detail;
  detail << "slope=" << slope << " CI=[" << fit.at("slope_ci").at(0).get<double>()
         << "," << fit.at("slope_ci").at(1).get<double>() << "]"
         << " predicted=" << predicted << " monotone=" << monotone;
  return {monotone && slope >= 0.5 * predicted, detail.str()};
}

// C11: byte-identical rates.csv under a different worker count.
Outcome c11_determinism(bool include_euler) {
  std::ostringstream detail;
  bool pass = true;
  {
    fs::path cfg = write_config("transport_rate.json", transport_rate_config());
    fs::path out = g_out_dir / "c11_transport";
    int code = run_command(std::string(TNLAB_CLI_PATH) + " rate --config " +
                           cfg.string() + " --out " + out.string() + " --workers 3");
    bool same = code == 0 && file_bytes(g_out_dir / "c9" / "rates.csv") ==
                                 file_bytes(out / "rates.csv");
    detail << "transport_identical=" << same;
    pass = pass && same;
  }
  if (include_euler) {
    fs::path cfg = write_config("euler_rate.json", euler_rate_config());
    fs::path out = g_out_dir / "c11_euler";
    int code = run_command(std::string(TNLAB_CLI_PATH) + " rate --config " +
                           cfg.string() + " --out " + out.string() + " --workers 3");
    bool same = code == 0 && file_bytes(g_out_dir / "c10" / "rates.csv") ==
                                 file_bytes(out / "rates.csv");
    detail << " euler_identical=" << same;
    pass = pass && same;
  }
  return {pass, detail.str()};
}

// C12: dense one-step oracles and direct-summation norms on 8x8 grids.
Outcome c12_small_grid_oracles() {
  Grid g(2, 2.0 * M_PI, 8);
  std::ostringstream detail;
  bool pass = true;

  NoiseBasis basis = build_basis(band_spec(2, 0.6, 1.4, 1.0), g);
  SolverConfig cfg;
  cfg.kappa = basis.kappa_grid;
  cfg.dt = 5e-3;
  cfg.T = 1.0;
  SpectralField f0 = random_band_limited(g, 2027, 0, 1, 2, 0.5);
  oracle::cvec c0(f0.coeffs.begin(), f0.coeffs.end());
  double scale = f0.max_abs();

  {  // transport
    PathState next = step_transport(PathState::from_initial(f0), basis, cfg, {1, 0, 0});
    auto inc = sample_increment(basis, cfg.dt, {1, 0, 0});
    auto ref = oracle::transport_step_dense(g, c0, cfg.kappa, cfg.dt, inc.dw, true);
    double err = oracle::max_abs_diff(ref, next.f_hat.coeffs) / scale;
    detail << "transport=" << err;
    pass = pass && err <= 1e-12;
  }
  {  // heat companion: exact multiplier
    PathState next = step_transport(PathState::from_initial(f0), basis, cfg, {1, 0, 0});
    oracle::cvec ref(c0);
    for (std::size_t k = 0; k < g.size(); ++k)
      ref[k] *= std::exp(-cfg.kappa * g.wavenumber_sq(k) * cfg.dt);
    double err = oracle::max_abs_diff(ref, next.fbar_hat.coeffs) / scale;
    detail << " heat=" << err;
    pass = pass && err <= 1e-12;
  }
  {  // stochastic vorticity
    PathState next = step_euler(PathState::from_initial(f0), basis, cfg, {2, 0, 0});
    auto inc = sample_increment(basis, cfg.dt, {2, 0, 0});
    auto ref = oracle::vorticity_step_dense(g, c0, cfg.kappa, cfg.dt, &inc.dw, true);
    double err = oracle::max_abs_diff(ref, next.f_hat.coeffs) / scale;
    detail << " euler=" << err;
    pass = pass && err <= 1e-12;
  }
  {  // deterministic vorticity
    PathState next = step_nse(PathState::from_initial(f0), cfg);
    auto ref = oracle::vorticity_step_dense(g, c0, cfg.kappa, cfg.dt, nullptr, true);
    double err = oracle::max_abs_diff(ref, next.fbar_hat.coeffs) / scale;
    detail << " nse=" << err;
    pass = pass && err <= 1e-12;
  }
  {  // norms against direct summation
    FourierWorkspace ws(g);
    ScalarField f = ws.inverse(f0);
    double worst = 0.0;
    for (double alpha : {-1.2, -0.6, 0.8}) {
      double a = sobolev_norm(f, NormSpec::homogeneous(alpha));
      double b = oracle::sobolev_direct(f, true, alpha);
      worst = std::max(worst, std::abs(a - b) / b);
      a = sobolev_norm(f, NormSpec::inhomogeneous(alpha));
      b = oracle::sobolev_direct(f, false, alpha);
      worst = std::max(worst, std::abs(a - b) / b);
    }
    detail << " norms=" << worst;
    pass = pass && worst <= 1e-12;
  }
  return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::string level = "commit";
  g_out_dir = fs::temp_directory_path() / "tnlab_acceptance";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--level" && i + 1 < argc) level = argv[++i];
    else if (arg == "--out" && i + 1 < argc) g_out_dir = argv[++i];
  }
  fs::create_directories(g_out_dir);

  struct Entry {
    std::string id;
    std::string name;
    std::function<Outcome()> run;
    bool nightly_only = false;
  };
  bool nightly = level == "nightly";
  std::vector<Entry> entries = {
      {"C1", "lattice kappa identity", c1_kappa_identity},
      {"C2", "Kraichnan norm scaling", c2_kraichnan_scaling},
      {"C3", "noise statistics", c3_noise_statistics},
      {"C4", "scheme-exact mild identity", c4_mild_identity},
      {"C5", "L^p quasi-conservation", c5_lp_conservation},
      {"C6", "heat semigroup ratios", c6_heat_semigroup},
      {"C7", "NSE a-priori bounds", c7_nse_apriori},
      {"C8", "interpolation inequality", c8_interpolation},
      {"C9", "transport rate experiment", c9_transport_rate},
      {"C10", "vorticity rate experiment", c10_euler_rate, true},
      {"C11", "worker-count determinism",
       [&] { return c11_determinism(nightly); }},
      {"C12", "small-grid dense oracles", c12_small_grid_oracles},
  };

  bool all_pass = true;
  for (const auto& e : entries) {
    if (e.nightly_only && !nightly) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %-4s %-28s [%6.1fs] %s\n", out.pass ? "PASS" : "FAIL",
                e.id.c_str(), e.name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
