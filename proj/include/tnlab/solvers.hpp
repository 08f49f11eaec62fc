#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "tnlab/fourier.hpp"
#include "tnlab/grid.hpp"
#include "tnlab/noise.hpp"
#include "tnlab/norms.hpp"

namespace tnlab {

/// Exponential (integrating-factor) Euler-Maruyama configuration.  The
/// diffusion e^{kappa*Delta*dt} is applied exactly in Fourier space, so dt is
/// constrained by advection only:
///   deterministic velocity: dt * max|u| * (N/L) <= 0.5 (hard),
///   noise displacement:     max|dW| * (N/L) <= noise_courant.
/// The noise bound is looser because the increment scales like sqrt(dt) and
/// the band-limited noise varies on scales far coarser than one cell; the
/// dt-refinement suite is the convergence check backing this limit.
struct SolverConfig {
  double kappa = 0.0;
  double dt = 0.0;
  double T = 0.0;
  bool dealias = true;
  bool dealias_noise = true;
  double noise_courant = 10.0;

  void validate() const {
    if (!(kappa > 0.0)) throw Error("SolverConfig: kappa must be positive");
    if (!(dt > 0.0)) throw Error("SolverConfig: dt must be positive");
    if (!(T >= dt)) throw Error("SolverConfig: need dt <= T");
  }
};

struct StepRecord {
  double time = 0.0;
  double mean = 0.0;
  double lp = std::numeric_limits<double>::quiet_NaN();
};

/// One sample path: the stochastic field f (or vorticity), its deterministic
/// companion fbar (heat flow or Navier-Stokes), and the accumulated
/// stochastic convolution Z.  All three share one grid and advance in
/// lock-step, which makes f - fbar - Z vanish identically for the scheme.
struct PathState {
  double time = 0.0;
  SpectralField f_hat;
  SpectralField fbar_hat;
  SpectralField z_hat;
  std::vector<StepRecord> diagnostics;

  static PathState from_initial(const SpectralField& f0_hat) {
    PathState s;
    s.f_hat = f0_hat;
    s.fbar_hat = f0_hat;
    s.z_hat = SpectralField(f0_hat.grid);
    return s;
  }

  /// Scheme-exact mild-identity defect |f - fbar - Z|_2.
  double convolution_defect() const {
    const Grid& g = f_hat.grid;
    double s = 0.0;
    for (std::size_t k = 0; k < f_hat.coeffs.size(); ++k)
      s += std::norm(f_hat.coeffs[k] - fbar_hat.coeffs[k] - z_hat.coeffs[k]);
    return std::sqrt(g.spectral_cell() * s);
  }
};

/// Exact heat flow e^{kappa*Delta*t} f0; no time-stepping error.
inline ScalarField solve_heat(const ScalarField& f0, double kappa, double t) {
  if (t < 0.0) throw Error("solve_heat: t must be nonnegative");
  FourierWorkspace ws(f0.grid);
  SpectralField F = ws.forward(f0);
  if (t > 0.0) apply_multiplier(F, heat_multiplier(f0.grid, kappa, t));
  return ws.inverse(F);
}

namespace detail {

/// u-hat from omega-hat:  u1 =  i xi2 w / |xi|^2,  u2 = -i xi1 w / |xi|^2,
/// zero mode dropped.  With this sign, curl u = d1 u2 - d2 u1 = omega and
/// div u = 0, both exact multiplier identities.
inline void biot_savart_hat(const SpectralField& w, SpectralField& u0,
                            SpectralField& u1) {
  const Grid& g = w.grid;
  const complex I(0.0, 1.0);
  for (std::size_t k = 0; k < w.coeffs.size(); ++k) {
    double xi2 = g.wavenumber_sq(k);
    if (xi2 == 0.0) {
      u0.coeffs[k] = 0.0;
      u1.coeffs[k] = 0.0;
      continue;
    }
    auto xi = g.wavenumber(k);
    complex wk = w.coeffs[k] / xi2;
    u0.coeffs[k] = I * xi[1] * wk;
    u1.coeffs[k] = -I * xi[0] * wk;
  }
}

/// Spectral gradient with the Nyquist line zeroed (the odd-derivative
/// partner mode does not exist there).
inline void gradient_hat(const SpectralField& f, SpectralField& g0,
                         SpectralField& g1) {
  const Grid& g = f.grid;
  const complex I(0.0, 1.0);
  int nyq = -g.points_per_dim / 2;
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    auto [i0, i1] = g.decode(k);
    int j0 = g.mode_of(i0);
    int j1 = g.dim == 2 ? g.mode_of(i1) : 0;
    auto xi = g.wavenumber(k);
    g0.coeffs[k] = j0 == nyq ? complex(0.0) : I * xi[0] * f.coeffs[k];
    if (g.dim == 2)
      g1.coeffs[k] = j1 == nyq ? complex(0.0) : I * xi[1] * f.coeffs[k];
  }
}

}  // namespace detail

/// Velocity from vorticity on the torus (d = 2).  Requires zero total
/// vorticity; the zero mode has no preimage under curl.
inline VectorField biot_savart(const ScalarField& omega) {
  if (omega.grid.dim != 2) throw Error("biot_savart: d must be 2");
  double l1 = lebesgue_norm(omega, 1.0);
  if (std::abs(omega.mean()) > 1e-10 * l1 / omega.grid.volume() && l1 > 0.0)
    throw NonzeroMeanVorticity("biot_savart: total vorticity is not zero");
  FourierWorkspace ws(omega.grid);
  SpectralField w = ws.forward(omega);
  SpectralField u0(omega.grid), u1(omega.grid);
  detail::biot_savart_hat(w, u0, u1);
  VectorField u(omega.grid);
  ws.inverse_pair(u0, u1, u.comp[0], u.comp[1]);
  return u;
}

/// Time stepper for the transport/heat pair and the vorticity/NSE pair.
/// Owns the FFT workspace and all scratch buffers, so stepping allocates
/// nothing; create one stepper per worker thread.
class Stepper {
 public:
  Stepper(const Grid& grid, const SolverConfig& cfg, const NoiseBasis* basis)
      : grid_(grid),
        cfg_(cfg),
        basis_(basis),
        ws_(grid),
        heat_(heat_multiplier(grid, cfg.kappa, cfg.dt)),
        mask_(dealias_mask(grid)),
        s0_(grid), s1_(grid), prod_hat_(grid), det_hat_(grid),
        dwa_(grid), dwb_(grid), ua_(grid), ub_(grid),
        ga_(grid), gb_(grid), prod_(grid) {
    cfg_.validate();
    // The Ito corrector kappa*Delta is tied to the noise intensity; a
    // mismatched pair would silently measure the wrong limit.  Empty bases
    // (zero noise) leave kappa free.
    if (basis_ && !basis_->empty()) {
      double kg = basis_->kappa_grid;
      if (std::abs(cfg_.kappa - kg) > 1e-12 * std::max(kg, 1.0))
        throw KappaMismatch("Stepper: cfg.kappa must equal basis.kappa_grid");
    }
  }

  const SolverConfig& config() const { return cfg_; }
  const Grid& grid() const { return grid_; }

  /// One exponential Euler-Maruyama step of
  ///   df + dW . grad f = kappa Delta f dt
  /// with dW sampled at the step start (Ito evaluation point), the heat
  /// companion advanced exactly, and the convolution accumulated with the
  /// same increment:
  ///   f    <- E (f - dW.grad f)
  ///   Z    <- E (Z - dW.grad f)
  ///   fbar <- E fbar,              E = e^{kappa Delta dt}.
  void step_transport(PathState& state, const SeedCoords& sc) {
    if (basis_ && !basis_->empty()) {
      sample_noise(sc);
      detail::gradient_hat(state.f_hat, s0_, s1_);
      ws_.inverse_pair(s0_, s1_, ga_, gb_);
      advection_product(dwa_, dwb_, 1.0);
      forward_product(cfg_.dealias_noise);
      update_with_product(state.f_hat);
      update_with_product(state.z_hat);
    } else {
      apply_multiplier(state.f_hat, heat_);
      apply_multiplier(state.z_hat, heat_);
    }
    apply_multiplier(state.fbar_hat, heat_);
    state.time += cfg_.dt;
  }

  /// One step of the stochastic vorticity equation
  ///   dw + u.grad w dt + dW.grad w = kappa Delta w dt,  u = curl^{-1} w,
  /// for state.f, and of the deterministic Navier-Stokes companion for
  /// state.fbar.  With an empty basis the two updates coincide.
  void step_euler(PathState& state, const SeedCoords& sc) {
    bool have_noise = basis_ && !basis_->empty();
    if (have_noise) sample_noise(sc);
    vorticity_update(state.f_hat, have_noise);
    vorticity_update(state.fbar_hat, false);
    state.time += cfg_.dt;
  }

  /// One deterministic NSE step of a vorticity field.
  void step_nse(SpectralField& w_hat) { vorticity_update(w_hat, false); }

  /// Largest pointwise |dW| of the most recently sampled increment.
  double last_noise_magnitude() const { return last_dw_max_; }

  ScalarField to_real(const SpectralField& F) { return ws_.inverse(F); }

  FourierWorkspace& workspace() { return ws_; }

 private:
  void sample_noise(const SeedCoords& sc) {
    detail::fill_increment_coeffs(*basis_, cfg_.dt, sc, s0_, s1_);
    ws_.inverse_pair(s0_, s1_, dwa_, dwb_);
    double m = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      double s = dwa_.values[k] * dwa_.values[k] + dwb_.values[k] * dwb_.values[k];
      m = std::max(m, s);
    }
    last_dw_max_ = std::sqrt(m);
    double courant = last_dw_max_ * grid_.points_per_dim / grid_.box_length;
    if (courant > cfg_.noise_courant)
      throw CflViolation("noise displacement " + std::to_string(courant) +
                         " cells exceeds noise_courant; reduce dt");
  }

  // prod <- (scale_v * v) . grad, with grad held in (ga_, gb_).
  void advection_product(const ScalarField& v0, const ScalarField& v1,
                         double scale_v) {
    for (std::size_t k = 0; k < grid_.size(); ++k)
      prod_.values[k] =
          scale_v * (v0.values[k] * ga_.values[k] + v1.values[k] * gb_.values[k]);
  }

  void forward_product(bool dealias) {
    ws_.forward_into(prod_, prod_hat_);
    if (dealias) apply_multiplier(prod_hat_, mask_);
    // grad pairs with a divergence-free advecting field, so the true zero
    // mode vanishes; pin it to keep mass conservation exact.
    prod_hat_.coeffs[0] = 0.0;
  }

  void update_with_product(SpectralField& target) {
    for (std::size_t k = 0; k < target.coeffs.size(); ++k)
      target.coeffs[k] =
          heat_.coeffs[k] * (target.coeffs[k] - prod_hat_.coeffs[k]);
  }

  void vorticity_update(SpectralField& w_hat, bool with_noise) {
    if (grid_.dim != 2) throw Error("vorticity step: d must be 2");
    double scale = w_hat.max_abs();
    if (std::abs(w_hat.coeffs[0]) > 1e-10 * std::max(scale, 1e-300))
      throw NonzeroMeanVorticity("vorticity step: nonzero mean vorticity");
    detail::biot_savart_hat(w_hat, s0_, s1_);
    ws_.inverse_pair(s0_, s1_, ua_, ub_);
    double umax = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      double s = ua_.values[k] * ua_.values[k] + ub_.values[k] * ub_.values[k];
      umax = std::max(umax, s);
    }
    umax = std::sqrt(umax);
    double courant = cfg_.dt * umax * grid_.points_per_dim / grid_.box_length;
    if (courant > 0.5)
      throw CflViolation("advective Courant number " + std::to_string(courant) +
                         " > 0.5; reduce dt");
    detail::gradient_hat(w_hat, s0_, s1_);
    ws_.inverse_pair(s0_, s1_, ga_, gb_);
    if (!with_noise) {
      advection_product(ua_, ub_, cfg_.dt);
      forward_product(cfg_.dealias);
    } else if (cfg_.dealias == cfg_.dealias_noise) {
      // Fold dt*u into the noise displacement: one product transform serves
      // both advection terms.
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        ua_.values[k] = cfg_.dt * ua_.values[k] + dwa_.values[k];
        ub_.values[k] = cfg_.dt * ub_.values[k] + dwb_.values[k];
      }
      advection_product(ua_, ub_, 1.0);
      forward_product(cfg_.dealias);
    } else {
      advection_product(ua_, ub_, cfg_.dt);
      forward_product(cfg_.dealias);
      det_hat_.coeffs.assign(prod_hat_.coeffs.begin(), prod_hat_.coeffs.end());
      advection_product(dwa_, dwb_, 1.0);
      forward_product(cfg_.dealias_noise);
      for (std::size_t k = 0; k < grid_.size(); ++k)
        prod_hat_.coeffs[k] += det_hat_.coeffs[k];
    }
    update_with_product(w_hat);
  }

  Grid grid_;
  SolverConfig cfg_;
  const NoiseBasis* basis_;
  FourierWorkspace ws_;
  SpectralField heat_;
  SpectralField mask_;
  SpectralField s0_, s1_, prod_hat_, det_hat_;
  ScalarField dwa_, dwb_, ua_, ub_, ga_, gb_, prod_;
  double last_dw_max_ = 0.0;
};

/// Contract-level free functions (conveniences over Stepper; unit-test
/// surface).  Hot loops should hold a Stepper instead.
inline PathState step_transport(const PathState& state, const NoiseBasis& basis,
                                const SolverConfig& cfg, const SeedCoords& sc) {
  Stepper st(state.f_hat.grid, cfg, &basis);
  PathState next = state;
  st.step_transport(next, sc);
  return next;
}

inline PathState step_euler(const PathState& state, const NoiseBasis& basis,
                            const SolverConfig& cfg, const SeedCoords& sc) {
  Stepper st(state.f_hat.grid, cfg, &basis);
  PathState next = state;
  st.step_euler(next, sc);
  return next;
}

inline PathState step_nse(const PathState& state, const SolverConfig& cfg) {
  Stepper st(state.fbar_hat.grid, cfg, nullptr);
  PathState next = state;
  st.step_nse(next.fbar_hat);
  next.time += cfg.dt;
  return next;
}

}  // namespace tnlab
