#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "tnlab/covariance.hpp"
#include "tnlab/initial_data.hpp"
#include "tnlab/noise.hpp"
#include "tnlab/norms.hpp"
#include "tnlab/solvers.hpp"

namespace tnlab {

/// Full description of one rate experiment: evolve the stochastic equation
/// and its deterministic companion from the same initial data, record the
/// sup-in-time error norm per sample path, estimate the q-th moment per
/// correlation scale ell, and fit the log-log decay as ell -> 0.
struct ExperimentConfig {
  std::string equation = "transport";  // "transport" | "euler"
  int d = 2;
  double L = 2.0 * M_PI;
  int N = 256;
  double p = 1.5;        // Lebesgue exponent of the initial data
  double alpha = 1.2;    // Sobolev error index (norm is H^{-alpha} flavored)
  double q = 0.0;        // moment order; 0 = pick the default for the equation
  double T = 0.25;
  double dt = 1e-3;
  std::vector<double> ell_grid;
  double lambda = 1.0;   // Kraichnan spectral slope
  int samples = 16;
  std::uint64_t seed = 0;
  std::string norm_kind = "homogeneous";  // | "inhomogeneous"
  bool dealias = true;
  bool dealias_noise = true;
  double noise_courant = 10.0;
  double epsilon = 0.01;  // slack in the inhomogeneous / vorticity exponents
  InitialData init;
  int snapshot_every = 0;        // dump .fld fields every k steps (0 = off)
  bool path_diagnostics = false; // per-path CSV of time, |f|_p, error norm
  bool l_doubling_check = false; // rerun the smallest ell on a (2L, 2N) box

  double conjugate_p() const { return p / (p - 1.0); }
  double dual_r() const { return p / (2.0 - p); }  // the norm index p/(2-p)

  double moment_order() const {
    if (q > 0.0) return q;
    return equation == "euler" ? std::ceil(conjugate_p()) + 1.0 : 2.0;
  }

  NormSpec error_norm() const {
    return norm_kind == "inhomogeneous" ? NormSpec::inhomogeneous(-alpha)
                                        : NormSpec::homogeneous(-alpha);
  }

  Grid grid() const { return Grid(d, L, N); }

  void validate() const;
};

namespace detail {

inline void check_window(bool ok, const std::string& msg) {
  if (!ok) throw ParameterOutOfRange(msg);
}

/// Lower end of the vorticity-route window for homogeneous transport norms
/// with alpha <= d/2.
inline double transport_low_alpha_floor(int d, double p) {
  return d * (d + 2.0) * (2.0 - p) / (2.0 * (2.0 * p + d * (2.0 - p)));
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  if (equation != "transport" && equation != "euler")
    throw ParameterOutOfRange("equation must be 'transport' or 'euler'");
  if (norm_kind != "homogeneous" && norm_kind != "inhomogeneous")
    throw ParameterOutOfRange("norm_kind must be 'homogeneous' or 'inhomogeneous'");
  Grid g(d, L, N);  // validates d, L, N
  if (!(dt > 0.0 && T >= dt)) throw ParameterOutOfRange("need 0 < dt <= T");
  if (!(lambda > 0.0)) throw ParameterOutOfRange("lambda must be positive");
  if (samples < 1) throw ParameterOutOfRange("samples must be >= 1");
  if (ell_grid.empty()) throw ParameterOutOfRange("ell_grid must be nonempty");
  for (double ell : ell_grid) {
    if (!(ell > 0.0 && ell < 1.0))
      throw ParameterOutOfRange("every ell must lie in (0,1)");
    if (g.max_wavenumber() < 2.0 / ell)
      throw ParameterOutOfRange("ell = " + std::to_string(ell) +
                                " is not resolvable on this grid");
  }
  if (!(moment_order() >= 1.0)) throw ParameterOutOfRange("q must be >= 1");

  if (equation == "transport") {
    detail::check_window(p > 1.0 && p <= 2.0, "transport requires p in (1, 2]");
    if (norm_kind == "homogeneous") {
      bool maximal = alpha > 0.5 * d && alpha < 0.5 * d + 1.0;
      bool interpolated =
          alpha > detail::transport_low_alpha_floor(d, p) && alpha <= 0.5 * d;
      detail::check_window(maximal || interpolated,
                           "homogeneous transport needs alpha in (d/2, d/2+1) "
                           "or in (d(d+2)(2-p)/(2(2p+d(2-p))), d/2]");
    } else {
      double lo = d * (1.0 / p - 0.5);
      detail::check_window(alpha > lo && alpha <= 0.5 * d,
                           "inhomogeneous transport needs alpha in (d(1/p-1/2), d/2]");
      detail::check_window(epsilon > 0.0 && epsilon < std::min(1.0, alpha - lo),
                           "epsilon must lie in (0, min(1, alpha - d(1/p-1/2)))");
    }
  } else {
    detail::check_window(d == 2, "euler requires d = 2");
    detail::check_window(p > std::sqrt(2.0) && p < 2.0,
                         "euler requires p in (sqrt(2), 2)");
    detail::check_window(alpha > 2.0 - p && alpha < 2.0 - 2.0 / p,
                         "euler requires alpha in (2-p, 2-2/p)");
    detail::check_window(moment_order() > conjugate_p(), "euler requires q > p'");
    double theta = conjugate_p() * (1.0 - alpha + epsilon) / 2.0;
    detail::check_window(theta > 0.0 && theta < 1.0,
                         "euler exponent weight theta = p'(1-alpha+eps)/2 "
                         "must lie in (0,1)");
  }
  init.validate(d, p);
}

/// Decay exponent of the error bound along the Kraichnan family, using
/// |g_ell|_{L^r} ~ ell^{d(r-1)/r} with r = p/(2-p) (the L^1 factor is
/// constant along the family and contributes no decay):
///   transport, homogeneous, alpha in (d/2, d/2+1):   (1/2) d (r-1)/r
///   transport, homogeneous, alpha <= d/2:            ((1-theta)/2) d (r-1)/r,
///                                                    theta = p'(d/2+eps-alpha)/d
///   transport, inhomogeneous:                        (eps/(d+4eps-2alpha)) d (r-1)/r
///   vorticity:                                       ((1-theta)/2) d (r-1)/r,
///                                                    theta = p'(1-alpha+eps)/2
inline double predicted_exponent(const ExperimentConfig& cfg) {
  cfg.validate();
  double d = cfg.d;
  double scale;  // ell-exponent of |g_ell|_r
  if (cfg.p == 2.0)
    scale = d;
  else {
    double r = cfg.dual_r();
    scale = d * (r - 1.0) / r;
  }
  if (cfg.equation == "transport") {
    if (cfg.norm_kind == "homogeneous") {
      if (cfg.alpha > 0.5 * d) return 0.5 * scale;
      double theta = cfg.conjugate_p() * (0.5 * d + cfg.epsilon - cfg.alpha) / d;
      detail::check_window(theta > 0.0 && theta < 1.0,
                           "interpolated transport weight theta out of (0,1)");
      return 0.5 * (1.0 - theta) * scale;
    }
    return cfg.epsilon / (d + 4.0 * cfg.epsilon - 2.0 * cfg.alpha) * scale;
  }
  double theta = cfg.conjugate_p() * (1.0 - cfg.alpha + cfg.epsilon) / 2.0;
  return 0.5 * (1.0 - theta) * scale;
}

/// Right-hand side of the predicted error bound for one ell (modulo the absolute
/// constant): |f0|_p times the continuum spectral-norm factors.
inline double bound_rhs(const ExperimentConfig& cfg, double ell, double f0_lp) {
  CovarianceSpec spec = kraichnan_spec(cfg.d, ell, cfg.lambda);
  double r = cfg.p == 2.0 ? std::numeric_limits<double>::infinity() : cfg.dual_r();
  double g_r = spectral_norm(spec, r);
  double g_1 = spectral_norm(spec, 1.0);
  if (cfg.equation == "transport") {
    if (cfg.norm_kind == "homogeneous") {
      if (cfg.alpha > 0.5 * cfg.d) return f0_lp * std::sqrt(g_r);
      double theta =
          cfg.conjugate_p() * (0.5 * cfg.d + cfg.epsilon - cfg.alpha) / cfg.d;
      return f0_lp * std::pow(g_1, 0.5 * theta) * std::pow(g_r, 0.5 * (1.0 - theta));
    }
    double w = cfg.epsilon / (cfg.d + 4.0 * cfg.epsilon - 2.0 * cfg.alpha);
    return f0_lp * std::pow(g_1, 0.5 - w) * std::pow(g_r, w);
  }
  double theta = cfg.conjugate_p() * (1.0 - cfg.alpha + cfg.epsilon) / 2.0;
  return f0_lp * std::pow(g_1, 0.5 * theta) * std::pow(g_r, 0.5 * (1.0 - theta));
}

/// Initial spectral data for the experiment: the configured profile,
/// band-limited when dealiasing is on, mean-removed for vorticity.
inline SpectralField experiment_initial_hat(const ExperimentConfig& cfg,
                                            const Grid& grid) {
  ScalarField f0 = make_initial_field(grid, cfg.init);
  SpectralField f0_hat = forward_transform(f0);
  if (cfg.dealias) apply_multiplier(f0_hat, dealias_mask(grid));
  if (cfg.equation == "euler") remove_mean(f0_hat);
  return f0_hat;
}

namespace detail {

/// Norm of a - b evaluated without forming the difference field.
inline double diff_norm(const SpectralField& a, const SpectralField& b,
                        const NormSpec& spec) {
  const Grid& g = a.grid;
  bool homogeneous = spec.kind == NormSpec::Kind::homogeneous_sobolev;
  double alpha = spec.index;
  auto term = [&](std::size_t k) {
    double xi2 = g.wavenumber_sq(k);
    double m = std::norm(a.coeffs[k] - b.coeffs[k]);
    if (homogeneous) return xi2 == 0.0 ? 0.0 : std::pow(xi2, alpha) * m;
    return std::pow(1.0 + xi2, alpha) * m;
  };
  double s = pairwise_sum(term, 0, a.coeffs.size());
  return std::sqrt(g.spectral_cell() * s);
}

inline double spectral_l2(const SpectralField& a) {
  auto term = [&](std::size_t k) { return std::norm(a.coeffs[k]); };
  return std::sqrt(a.grid.spectral_cell() *
                   pairwise_sum(term, 0, a.coeffs.size()));
}

}  // namespace detail

struct PathOutcome {
  double sup_err = 0.0;      // sup over recorded steps of the error norm
  double max_defect = 0.0;   // sup of |f - fbar - Z|_2 (transport only)
  double sup_lp_dev = 0.0;   // sup of | |f_t|_p / |f0|_p - 1 | when tracked
};

struct PathTrace {
  std::vector<double> times;
  std::vector<double> err;
  std::vector<double> lp;
};

/// Receives field dumps every `every` steps; the callback owns the format.
struct SnapshotSink {
  int every = 0;
  std::function<void(const std::string& quantity, double time, const ScalarField&)>
      write;
};

/// Evolve one sample path and record the running error statistics.
/// `track_lp` adds one inverse transform per step.
inline PathOutcome run_path(Stepper& st, const SpectralField& f0_hat,
                            const ExperimentConfig& cfg, std::uint32_t sample,
                            bool track_lp = false, PathTrace* trace = nullptr,
                            SnapshotSink* snaps = nullptr) {
  PathState state = PathState::from_initial(f0_hat);
  NormSpec err_norm = cfg.error_norm();
  bool transport = cfg.equation == "transport";
  int n_steps = static_cast<int>(std::llround(cfg.T / cfg.dt));
  double f0_l2 = detail::spectral_l2(f0_hat);
  double f0_lp = track_lp ? lebesgue_norm(st.to_real(f0_hat), cfg.p) : 0.0;
  PathOutcome out;
  if (trace) {
    trace->times.push_back(0.0);
    trace->err.push_back(0.0);
    if (track_lp) trace->lp.push_back(f0_lp);
  }
  for (int step = 0; step < n_steps; ++step) {
    SeedCoords sc{cfg.seed, sample, static_cast<std::uint32_t>(step)};
    if (transport) {
      st.step_transport(state, sc);
      double defect = state.convolution_defect();
      out.max_defect = std::max(out.max_defect, defect);
      if (defect > 1e-10 * f0_l2)
        throw IdentityDefect("mild identity defect " + std::to_string(defect) +
                             " exceeds 1e-10 |f0|_2");
    } else {
      st.step_euler(state, sc);
    }
    double err = detail::diff_norm(state.f_hat, state.fbar_hat, err_norm);
    out.sup_err = std::max(out.sup_err, err);
    double lp = 0.0;
    if (track_lp) {
      lp = lebesgue_norm(st.to_real(state.f_hat), cfg.p);
      out.sup_lp_dev = std::max(out.sup_lp_dev, std::abs(lp / f0_lp - 1.0));
    }
    if (trace) {
      trace->times.push_back(state.time);
      trace->err.push_back(err);
      if (track_lp) trace->lp.push_back(lp);
    }
    if (snaps && snaps->every > 0 && (step + 1) % snaps->every == 0) {
      snaps->write("f", state.time, st.to_real(state.f_hat));
      snaps->write("fbar", state.time, st.to_real(state.fbar_hat));
      if (transport) snaps->write("z", state.time, st.to_real(state.z_hat));
    }
  }
  return out;
}

struct EllEstimate {
  double ell = 0.0;
  double estimate = 0.0;   // (E sup_t |f - fbar|^q)^{1/q}, Monte Carlo
  double stderr_ = 0.0;    // bootstrap standard error of the estimate
  double bound = 0.0;      // predicted bound, constant-free
  double kappa_grid = 0.0;
  double max_defect = 0.0;
  std::vector<double> sup_values;  // per-sample sup-in-time errors
};

inline double moment_estimate(const std::vector<double>& values, double q) {
  double s = 0.0;
  for (double v : values) s += std::pow(v, q);
  return std::pow(s / values.size(), 1.0 / q);
}

/// Seeded bootstrap standard error of the q-th moment estimate.
/// `stream` decorrelates resampling across ell values.
inline double bootstrap_stderr(const std::vector<double>& values, double q,
                               std::uint64_t seed, std::uint32_t stream,
                               int resamples = 1000) {
  std::size_t n = values.size();
  if (n < 2) return 0.0;
  std::vector<double> boot(resamples);
  std::vector<double> pick(n);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t idx = uniform_index(seed, stream * 65521u + b,
                                        static_cast<std::uint32_t>(i),
                                        static_cast<std::uint32_t>(n));
      pick[i] = values[idx];
    }
    boot[b] = moment_estimate(pick, q);
  }
  double mean = 0.0;
  for (double v : boot) mean += v;
  mean /= resamples;
  double var = 0.0;
  for (double v : boot) var += (v - mean) * (v - mean);
  return std::sqrt(var / (resamples - 1));
}

/// Monte Carlo estimate of the error moment at one correlation scale.
/// Paths run in parallel; results are keyed by sample index, so the outcome
/// is bitwise independent of the worker count.  Any path failure aborts the
/// estimate (dropped paths would bias the moment).
inline EllEstimate mc_estimate(const ExperimentConfig& cfg, double ell,
                               int workers) {
  cfg.validate();
  Grid grid = cfg.grid();
  CovarianceSpec spec = kraichnan_spec(cfg.d, ell, cfg.lambda);
  NoiseBasis basis = build_basis(spec, grid);
  SolverConfig scfg;
  scfg.kappa = basis.empty() ? kappa(spec) : basis.kappa_grid;
  if (!(scfg.kappa > 0.0)) scfg.kappa = 1.0;  // zero-noise degenerate case
  scfg.dt = cfg.dt;
  scfg.T = cfg.T;
  scfg.dealias = cfg.dealias;
  scfg.dealias_noise = cfg.dealias_noise;
  scfg.noise_courant = cfg.noise_courant;
  SpectralField f0_hat = experiment_initial_hat(cfg, grid);

  int n = cfg.samples;
  std::vector<double> sups(n, 0.0);
  std::vector<double> defects(n, 0.0);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  int n_workers = std::max(1, std::min(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&]() {
      try {
        Stepper st(grid, scfg, &basis);
        int task;
        while ((task = next.fetch_add(1)) < n && !failed.load()) {
          PathOutcome out =
              run_path(st, f0_hat, cfg, static_cast<std::uint32_t>(task));
          sups[task] = out.sup_err;
          defects[task] = out.max_defect;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  EllEstimate est;
  est.ell = ell;
  est.kappa_grid = basis.kappa_grid;
  est.sup_values = sups;
  double q = cfg.moment_order();
  est.estimate = moment_estimate(sups, q);
  // Stream id ties the bootstrap to the physical scale, not the grid index.
  auto stream = static_cast<std::uint32_t>(std::llround(1e6 * ell));
  est.stderr_ = bootstrap_stderr(sups, q, cfg.seed, stream);
  double f0_lp = lebesgue_norm(inverse_transform(f0_hat), cfg.p);
  est.bound = bound_rhs(cfg, ell, f0_lp);
  for (double d : defects) est.max_defect = std::max(est.max_defect, d);
  return est;
}

struct ConvolutionReport {
  double max_defect = 0.0;  // sup_t |f - fbar - Z|_2 over one seeded path
  double z_moment = 0.0;    // (E sup_t |Z|^q)^{1/q}; equals the error moment
                            // since f - fbar is exactly Z for the scheme
};

/// Single-path check of the scheme-exact mild identity (throws
/// IdentityDefect beyond 1e-10 |f0|_2), plus the Monte Carlo moment of the
/// accumulated convolution for comparison with the maximal-estimate bound.
inline ConvolutionReport convolution_consistency(const ExperimentConfig& cfg,
                                                 double ell, int workers = 1) {
  if (cfg.equation != "transport")
    throw Error("convolution_consistency: transport equation only");
  Grid grid = cfg.grid();
  CovarianceSpec spec = kraichnan_spec(cfg.d, ell, cfg.lambda);
  NoiseBasis basis = build_basis(spec, grid);
  SolverConfig scfg;
  scfg.kappa = basis.empty() ? 1.0 : basis.kappa_grid;
  scfg.dt = cfg.dt;
  scfg.T = cfg.T;
  scfg.dealias = cfg.dealias;
  scfg.dealias_noise = cfg.dealias_noise;
  scfg.noise_courant = cfg.noise_courant;
  Stepper st(grid, scfg, &basis);
  SpectralField f0_hat = experiment_initial_hat(cfg, grid);
  ConvolutionReport rep;
  rep.max_defect = run_path(st, f0_hat, cfg, 0).max_defect;
  rep.z_moment = mc_estimate(cfg, ell, workers).estimate;
  return rep;
}

struct RateFit {
  std::vector<double> ell_values;
  std::vector<double> estimates;
  std::vector<double> stderrs;
  std::vector<double> bounds;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
  double predicted = 0.0;
  double bound_constant = 0.0;   // max over ell of estimate / bound
  double constant_spread = 1.0;  // max/min of the implied constants
  bool monotone_2sigma = true;
};

namespace detail {

inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y,
                        double* intercept = nullptr) {
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= x.size();
  ym /= y.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (intercept) *intercept = ym - sxy / sxx * xm;
  return sxy / sxx;
}

}  // namespace detail

/// Ordinary least squares of log(estimate) on log(ell), with a bootstrap
/// (resampling sample paths within each ell) 95% interval for the slope.
inline RateFit fit_rate(const ExperimentConfig& cfg,
                        const std::vector<EllEstimate>& results) {
  RateFit fit;
  std::vector<double> lx, ly;
  for (const auto& r : results) {
    fit.ell_values.push_back(r.ell);
    fit.estimates.push_back(r.estimate);
    fit.stderrs.push_back(r.stderr_);
    fit.bounds.push_back(r.bound);
    if (r.estimate > 0.0) {
      lx.push_back(std::log(r.ell));
      ly.push_back(std::log(r.estimate));
    }
  }
  if (lx.size() < 3)
    throw DegenerateFit("fit_rate: need >= 3 positive estimates");
  fit.slope = detail::ols_slope(lx, ly, &fit.intercept);
  fit.predicted = predicted_exponent(cfg);

  // Bootstrap the whole fit by resampling paths within each ell.
  const int B = 1000;
  double q = cfg.moment_order();
  std::vector<double> slopes;
  slopes.reserve(B);
  std::vector<double> pick;
  for (int b = 0; b < B; ++b) {
    std::vector<double> bx, by;
    for (std::size_t e = 0; e < results.size(); ++e) {
      const auto& vals = results[e].sup_values;
      std::size_t n = vals.size();
      pick.resize(n);
      auto stream = static_cast<std::uint32_t>(e + 1) * 2654435761u;
      for (std::size_t i = 0; i < n; ++i)
        pick[i] = vals[uniform_index(cfg.seed, stream + b, static_cast<std::uint32_t>(i),
                                     static_cast<std::uint32_t>(n))];
      double est = moment_estimate(pick, q);
      if (est > 0.0) {
        bx.push_back(std::log(results[e].ell));
        by.push_back(std::log(est));
      }
    }
    if (bx.size() >= 3) slopes.push_back(detail::ols_slope(bx, by));
  }
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    auto quantile = [&](double f) {
      double pos = f * (slopes.size() - 1);
      std::size_t i = static_cast<std::size_t>(pos);
      double frac = pos - i;
      return i + 1 < slopes.size() ? slopes[i] * (1.0 - frac) + slopes[i + 1] * frac
                                   : slopes.back();
    };
    fit.slope_ci_lo = quantile(0.025);
    fit.slope_ci_hi = quantile(0.975);
  }

  // Implied constants estimate/bound should be uniform along the family.
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (const auto& r : results) {
    if (r.bound > 0.0 && r.estimate > 0.0) {
      double c = r.estimate / r.bound;
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  fit.bound_constant = cmax;
  fit.constant_spread = cmin > 0.0 && std::isfinite(cmin) ? cmax / cmin : 1.0;

  // Adjacent estimates (sorted by decreasing ell) must decrease at 2 sigma.
  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a].ell > results[b].ell;
  });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto& big = results[order[i]];
    const auto& small = results[order[i + 1]];
    double gap = big.estimate - small.estimate;
    double sigma = std::hypot(big.stderr_, small.stderr_);
    if (gap < 2.0 * sigma) fit.monotone_2sigma = false;
  }
  return fit;
}

/// Run the configured ell sweep and fit the rate.
inline RateFit run_rate_experiment(const ExperimentConfig& cfg, int workers,
                                   std::vector<EllEstimate>* raw = nullptr) {
  cfg.validate();
  std::vector<EllEstimate> results;
  for (double ell : cfg.ell_grid) results.push_back(mc_estimate(cfg, ell, workers));
  RateFit fit = fit_rate(cfg, results);
  if (raw) *raw = results;
  return fit;
}

/// Domain-truncation control: rerun one scale on a doubled box (2L, 2N keeps
/// the lattice spacing and the physical initial profile) and report the
/// relative shift of the estimate.  A soft diagnostic, not a hard gate.
inline double l_doubling_delta(const ExperimentConfig& cfg, double ell,
                               double base_estimate, int workers) {
  ExperimentConfig wide = cfg;
  wide.L = 2.0 * cfg.L;
  wide.N = 2 * cfg.N;
  wide.ell_grid = {ell};
  EllEstimate est = mc_estimate(wide, ell, workers);
  return base_estimate > 0.0 ? std::abs(est.estimate - base_estimate) / base_estimate
                             : 0.0;
}

}  // namespace tnlab
