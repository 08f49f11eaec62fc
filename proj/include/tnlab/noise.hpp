#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tnlab/covariance.hpp"
#include "tnlab/fourier.hpp"
#include "tnlab/grid.hpp"
#include "tnlab/rng.hpp"

namespace tnlab {

/// One discretized noise mode: a wavenumber-lattice representative j (one per
/// conjugate pair), a unit polarization e exactly orthogonal to xi_j, and the
/// amplitude a carrying one lattice cell of spectral mass,
///   a_j^2 = integral of g over the cell [xi_j - dk/2, xi_j + dk/2]^d.
/// (The midpoint value g(xi_j)*(2pi/L)^d is biased by 3-13% for sharply
/// cut-off bands at moderate dk; exact cell masses make the lattice
/// viscosity match the quadrature kappa to the subcell tolerance.)
/// Each mode carries an independent cosine and sine phase, so the
/// real-field expansion is
///   dW(x) = sqrt(dt) * sum_m a_m e_m [ sqrt(2) cos(xi_m.x) Zc_m
///                                    + sqrt(2) sin(xi_m.x) Zs_m ].
struct NoiseMode {
  std::array<int, 2> j;        // integer lattice representative
  std::array<double, 2> xi;    // physical wavenumber
  std::array<double, 2> pol;   // unit polarization, pol . xi == 0
  double amp;                  // cell-mass amplitude a_j
  bool interior;               // cell fully inside the density support
};

struct NoiseBasis {
  Grid grid;
  std::vector<NoiseMode> modes;
  double kappa_grid = 0.0;

  bool empty() const { return modes.empty(); }
};

namespace detail {

/// Integral of g over one wavenumber cell centered at (x0, x1), side dk.
/// Cells cut by the support boundary get a fine midpoint grid; smooth
/// interior cells need only a coarse one.
inline double cell_mass(const CovarianceSpec& spec, double x0, double x1,
                        double dk, bool* interior = nullptr) {
  double cx = std::clamp(0.0, x0 - 0.5 * dk, x0 + 0.5 * dk);
  double cy = std::clamp(0.0, x1 - 0.5 * dk, x1 + 0.5 * dk);
  double rmin = std::hypot(cx, cy);
  double rmax = 0.0;
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2)
      rmax = std::max(rmax, std::hypot(x0 + 0.5 * sx * dk, x1 + 0.5 * sy * dk));
  bool inside = rmin >= spec.support_lo && rmax <= spec.support_hi;
  if (interior) *interior = inside;
  if (rmax < spec.support_lo || rmin > spec.support_hi) return 0.0;
  int s = inside ? 8 : 64;
  double h = dk / s, mass = 0.0;
  for (int a = 0; a < s; ++a) {
    double xa = x0 - 0.5 * dk + (a + 0.5) * h;
    for (int b = 0; b < s; ++b) {
      double xb = x1 - 0.5 * dk + (b + 0.5) * h;
      mass += spec.density(std::hypot(xa, xb));
    }
  }
  return mass * h * h;
}

}  // namespace detail

/// Discretize the covariance onto the grid's wavenumber lattice.
/// Requires the lattice to cover the support of g; modes are enumerated in a
/// fixed canonical order (owner of each conjugate pair, row-major), which the
/// sampling keys depend on.
inline NoiseBasis build_basis(const CovarianceSpec& spec, const Grid& grid) {
  if (spec.dim != grid.dim) throw Error("build_basis: dimension mismatch");
  NoiseBasis basis;
  basis.grid = grid;
  if (spec.family != CovarianceSpec::Family::zero &&
      grid.max_wavenumber() < spec.support_hi)
    throw UnresolvedSpectrum(
        "build_basis: grid max wavenumber " + std::to_string(grid.max_wavenumber()) +
        " does not cover spectral support up to " + std::to_string(spec.support_hi));

  // d = 1 admits no divergence-free modes (the projection has rank d-1 = 0).
  if (grid.dim == 1) return basis;

  int half = grid.points_per_dim / 2;
  double dk = grid.dk();
  double kappa_sum = 0.0;
  for (int j0 = -(half - 1); j0 <= half - 1; ++j0) {
    for (int j1 = -(half - 1); j1 <= half - 1; ++j1) {
      if (j0 == 0 && j1 == 0) continue;
      // One representative per conjugate pair {j, -j}.
      if (!(j0 > 0 || (j0 == 0 && j1 > 0))) continue;
      double xi0 = dk * j0, xi1 = dk * j1;
      double norm = std::hypot(xi0, xi1);
      // Quick reject: cell cannot touch the support.
      if (norm < spec.support_lo - dk || norm > spec.support_hi + dk) continue;
      bool interior = false;
      double mass = detail::cell_mass(spec, xi0, xi1, dk, &interior);
      if (mass <= 0.0) continue;
      NoiseMode m;
      m.j = {j0, j1};
      m.xi = {xi0, xi1};
      m.pol = {-xi1 / norm, xi0 / norm};
      m.amp = std::sqrt(mass);
      m.interior = interior;
      kappa_sum += mass;
      basis.modes.push_back(m);
    }
  }
  // Q_grid(0) = 2 sum_m a^2 (e x e); trace/(2d) gives the grid viscosity.
  basis.kappa_grid = kappa_sum / grid.dim;
  return basis;
}

/// Analytic grid covariance Q_grid(r) = sum_m 2 a^2 (e x e) cos(xi . r).
/// Depends on positions only through their difference, by construction.
inline std::array<std::array<double, 2>, 2> analytic_covariance(
    const NoiseBasis& basis, const std::array<double, 2>& displacement) {
  std::array<std::array<double, 2>, 2> q = {{{0.0, 0.0}, {0.0, 0.0}}};
  for (const auto& m : basis.modes) {
    double phase = m.xi[0] * displacement[0] + m.xi[1] * displacement[1];
    double w = 2.0 * m.amp * m.amp * std::cos(phase);
    q[0][0] += w * m.pol[0] * m.pol[0];
    q[0][1] += w * m.pol[0] * m.pol[1];
    q[1][0] += w * m.pol[1] * m.pol[0];
    q[1][1] += w * m.pol[1] * m.pol[1];
  }
  return q;
}

/// Sum over all basis elements (cosine and sine phases) of
///   sigma_hat(xi_j) (x) conj(sigma_hat(xi_j'))^T,
/// evaluated from the mode table: each element is supported on one conjugate
/// pair, with exponential coefficients a e / sqrt(2) (cosine) and
/// -+ i a e / sqrt(2) (sine).  The sum is exactly zero for j' != +-j, and
/// a^2 (e x e) = mass * P_xi at j' = j; the j' = -j contributions cancel.
inline std::array<std::array<complex, 2>, 2> mode_overlap(
    const NoiseBasis& basis, const std::array<int, 2>& j,
    const std::array<int, 2>& jp) {
  std::array<std::array<complex, 2>, 2> out = {
      {{complex(0.0), complex(0.0)}, {complex(0.0), complex(0.0)}}};
  const complex I(0.0, 1.0);
  for (const auto& m : basis.modes) {
    auto coeff_at = [&](const std::array<int, 2>& target, bool sine) -> complex {
      double a = m.amp / std::sqrt(2.0);
      if (target == m.j) return sine ? -I * a : complex(a);
      if (target[0] == -m.j[0] && target[1] == -m.j[1])
        return sine ? I * a : complex(a);
      return complex(0.0);
    };
    complex w = coeff_at(j, false) * std::conj(coeff_at(jp, false)) +
                coeff_at(j, true) * std::conj(coeff_at(jp, true));
    if (w == complex(0.0)) continue;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out[a][b] += w * m.pol[a] * m.pol[b];
  }
  return out;
}

struct NoiseIncrement {
  Grid grid;
  VectorField dw;
  double dt = 0.0;
  SeedCoords seeds;
};

namespace detail {

/// Spectral coefficients of one increment component.  The exponential
/// coefficient of mode j is a * e_i * (Zc - i Zs) / sqrt(2) * sqrt(dt);
/// conversion to the stored convention multiplies by (2*pi)^{-d/2} L^d.
inline void fill_increment_coeffs(const NoiseBasis& basis, double dt,
                                  const SeedCoords& sc, SpectralField& c0,
                                  SpectralField& c1) {
  const Grid& g = basis.grid;
  std::fill(c0.coeffs.begin(), c0.coeffs.end(), complex(0.0));
  std::fill(c1.coeffs.begin(), c1.coeffs.end(), complex(0.0));
  double convention = std::pow(2.0 * M_PI, -0.5 * g.dim) * g.volume();
  double root_dt = std::sqrt(dt);
  for (std::size_t m = 0; m < basis.modes.size(); ++m) {
    const NoiseMode& mode = basis.modes[m];
    auto z = normal_pair(sc, static_cast<std::uint32_t>(m));
    complex amp = mode.amp * root_dt * complex(z[0], -z[1]) / std::sqrt(2.0) *
                  convention;
    std::size_t k = g.encode(g.index_of(mode.j[0]), g.index_of(mode.j[1]));
    std::size_t kc = g.conjugate_index(k);
    c0.coeffs[k] += amp * mode.pol[0];
    c0.coeffs[kc] += std::conj(amp * mode.pol[0]);
    c1.coeffs[k] += amp * mode.pol[1];
    c1.coeffs[kc] += std::conj(amp * mode.pol[1]);
  }
}

}  // namespace detail

/// Draw one noise increment with variance dt * Q_grid.  Deterministic in
/// (seed, sample, step) and independent of parallel scheduling.  `ws` must
/// belong to the basis grid.
inline NoiseIncrement sample_increment(const NoiseBasis& basis, double dt,
                                       const SeedCoords& sc, FourierWorkspace& ws,
                                       SpectralField& scratch0, SpectralField& scratch1) {
  if (!(dt > 0.0)) throw Error("sample_increment: dt must be positive");
  NoiseIncrement inc;
  inc.grid = basis.grid;
  inc.dt = dt;
  inc.seeds = sc;
  inc.dw = VectorField(basis.grid);
  if (basis.empty()) return inc;
  detail::fill_increment_coeffs(basis, dt, sc, scratch0, scratch1);
  ws.inverse_pair(scratch0, scratch1, inc.dw.comp[0], inc.dw.comp[1]);
  return inc;
}

inline NoiseIncrement sample_increment(const NoiseBasis& basis, double dt,
                                       const SeedCoords& sc) {
  FourierWorkspace ws(basis.grid);
  SpectralField s0(basis.grid), s1(basis.grid);
  return sample_increment(basis, dt, sc, ws, s0, s1);
}

/// Evaluate the same increment at selected points by direct mode summation
/// (identical draws as the full-field path; cheap for covariance studies).
inline std::array<double, 2> increment_at(const NoiseBasis& basis, double dt,
                                          const SeedCoords& sc,
                                          const std::array<double, 2>& x) {
  std::array<double, 2> w = {0.0, 0.0};
  double root2 = std::sqrt(2.0), root_dt = std::sqrt(dt);
  for (std::size_t m = 0; m < basis.modes.size(); ++m) {
    const NoiseMode& mode = basis.modes[m];
    auto z = normal_pair(sc, static_cast<std::uint32_t>(m));
    double phase = mode.xi[0] * x[0] + mode.xi[1] * x[1];
    double f = mode.amp * root_dt * root2 *
               (std::cos(phase) * z[0] + std::sin(phase) * z[1]);
    w[0] += f * mode.pol[0];
    w[1] += f * mode.pol[1];
  }
  return w;
}

struct CovarianceEstimate {
  std::array<std::array<double, 2>, 2> empirical;
  std::array<std::array<double, 2>, 2> analytic;
};

/// Monte Carlo estimate of E[dW(x) (x) dW(y)] / dt at displacement x - y,
/// next to the analytic lattice covariance for comparison.
inline CovarianceEstimate empirical_covariance(const NoiseBasis& basis, int samples,
                                               const std::array<double, 2>& displacement,
                                               std::uint64_t seed) {
  if (samples < 2) throw Error("empirical_covariance: need samples >= 2");
  CovarianceEstimate est;
  est.analytic = analytic_covariance(basis, displacement);
  std::array<std::array<double, 2>, 2> acc = {{{0.0, 0.0}, {0.0, 0.0}}};
  const std::array<double, 2> x = {0.0, 0.0};
  const std::array<double, 2> y = {-displacement[0], -displacement[1]};
  const double dt = 1.0;
  for (int s = 0; s < samples; ++s) {
    SeedCoords sc{seed, static_cast<std::uint32_t>(s), 0};
    auto wx = increment_at(basis, dt, sc, x);
    auto wy = increment_at(basis, dt, sc, y);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) acc[a][b] += wx[a] * wy[b];
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) est.empirical[a][b] = acc[a][b] / (samples * dt);
  return est;
}

/// Largest relative spectral divergence max_j |xi_j . dW^(j)| of an
/// increment; zero up to roundoff because every mode is polarized
/// orthogonally to its wavenumber.
inline double spectral_divergence(const NoiseIncrement& inc, FourierWorkspace& ws) {
  if (inc.grid.dim == 1)
    return 0.0;
  SpectralField c0 = ws.forward(inc.dw.comp[0]);
  SpectralField c1 = ws.forward(inc.dw.comp[1]);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < inc.grid.size(); ++k) {
    auto xi = inc.grid.wavenumber(k);
    double div = std::abs(xi[0] * c0.coeffs[k] + xi[1] * c1.coeffs[k]);
    double mag = std::hypot(xi[0], xi[1]) *
                 std::max(std::abs(c0.coeffs[k]), std::abs(c1.coeffs[k]));
    worst = std::max(worst, div);
    scale = std::max(scale, mag);
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace tnlab
