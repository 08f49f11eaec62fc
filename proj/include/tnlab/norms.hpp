#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "tnlab/fourier.hpp"
#include "tnlab/grid.hpp"

namespace tnlab {

namespace detail {

/// Pairwise (tree) reduction: deterministic, order-independent, and with
/// O(log n) roundoff growth.
inline double pairwise_sum(const std::function<double(std::size_t)>& term,
                           std::size_t lo, std::size_t hi) {
  std::size_t n = hi - lo;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += term(k);
    return s;
  }
  std::size_t mid = lo + n / 2;
  return pairwise_sum(term, lo, mid) + pairwise_sum(term, mid, hi);
}

inline void require_mean_zero(const ScalarField& f, const char* what) {
  double l1 = 0.0;
  for (double v : f.values) l1 += std::abs(v);
  l1 *= f.grid.cell_volume();
  double bound = 1e-10 * l1 / f.grid.volume();
  if (std::abs(f.mean()) > bound && l1 > 0.0)
    throw MeanNotZero(std::string(what) + ": field mean is not zero");
}

inline void require_mean_zero_spectral(const SpectralField& F, const char* what) {
  // Zero mode holds (2*pi)^{-d/2} h^d sum f; compare against the coefficient scale.
  double scale = F.max_abs();
  if (std::abs(F.coeffs[0]) > 1e-10 * std::max(scale, 1e-300))
    throw MeanNotZero(std::string(what) + ": zero mode is not zero");
}

}  // namespace detail

struct NormSpec {
  enum class Kind { homogeneous_sobolev, inhomogeneous_sobolev, lebesgue };
  Kind kind = Kind::lebesgue;
  double index = 2.0;  // Sobolev order alpha (any sign) or Lebesgue exponent p

  static NormSpec homogeneous(double alpha) {
    return {Kind::homogeneous_sobolev, alpha};
  }
  static NormSpec inhomogeneous(double alpha) {
    return {Kind::inhomogeneous_sobolev, alpha};
  }
  static NormSpec lp(double p) { return {Kind::lebesgue, p}; }
};

/// (h^d sum |f|^p)^{1/p}; p = infinity gives max |f|.
inline double lebesgue_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw Error("lebesgue_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  const auto& v = f.values;
  double s = detail::pairwise_sum(
      [&](std::size_t k) { return std::pow(std::abs(v[k]), p); }, 0, v.size());
  return std::pow(f.grid.cell_volume() * s, 1.0 / p);
}

/// Sobolev norm on the lattice:
///   homogeneous:    ( sum_{j != 0} |xi_j|^{2a} |c_j|^2 (2*pi/L)^d )^{1/2}
///   inhomogeneous:  ( sum_j (1+|xi_j|^2)^a |c_j|^2 (2*pi/L)^d )^{1/2}
/// Negative-order homogeneous norms require a mean-zero field (the zero mode
/// is always excluded; the continuum integral carries no atom at xi = 0).
inline double sobolev_norm(const SpectralField& F, const NormSpec& spec) {
  if (spec.kind == NormSpec::Kind::lebesgue)
    throw Error("sobolev_norm: spec is a Lebesgue norm");
  double alpha = spec.index;
  bool homogeneous = spec.kind == NormSpec::Kind::homogeneous_sobolev;
  if (homogeneous && alpha < 0.0)
    detail::require_mean_zero_spectral(F, "sobolev_norm");
  const Grid& g = F.grid;
  double cell = g.spectral_cell();
  auto term = [&](std::size_t k) {
    double xi2 = g.wavenumber_sq(k);
    double a2 = std::norm(F.coeffs[k]);
    if (homogeneous) {
      if (xi2 == 0.0) return 0.0;
      return std::pow(xi2, alpha) * a2;
    }
    return std::pow(1.0 + xi2, alpha) * a2;
  };
  double s = detail::pairwise_sum(term, 0, F.coeffs.size());
  return std::sqrt(cell * s);
}

inline double sobolev_norm(const ScalarField& f, const NormSpec& spec) {
  if (spec.kind == NormSpec::Kind::lebesgue) return lebesgue_norm(f, spec.index);
  if (spec.kind == NormSpec::Kind::homogeneous_sobolev && spec.index < 0.0)
    detail::require_mean_zero(f, "sobolev_norm");
  return sobolev_norm(forward_transform(f), spec);
}

inline double field_norm(const SpectralField& F, const NormSpec& spec,
                         FourierWorkspace& ws) {
  if (spec.kind == NormSpec::Kind::lebesgue)
    return lebesgue_norm(ws.inverse(F), spec.index);
  return sobolev_norm(F, spec);
}

/// Fractional Laplacian as the Fourier multiplier |xi|^alpha.  The zero mode
/// maps to zero; negative orders therefore require a mean-zero input.
inline SpectralField fractional_laplacian(const SpectralField& F, double alpha) {
  if (alpha < 0.0) detail::require_mean_zero_spectral(F, "fractional_laplacian");
  SpectralField out = F;
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) {
    double xi2 = out.grid.wavenumber_sq(k);
    if (xi2 == 0.0)
      out.coeffs[k] = alpha == 0.0 ? F.coeffs[k] : complex(0.0);
    else
      out.coeffs[k] *= std::pow(xi2, 0.5 * alpha);
  }
  return out;
}

inline ScalarField fractional_laplacian(const ScalarField& f, double alpha) {
  return inverse_transform(fractional_laplacian(forward_transform(f), alpha));
}

struct InterpolationReport {
  double lhs = 0.0;   // |f| in H-dot^{-alpha}
  double rhs = 0.0;   // |f|_{H^{-gamma}}^theta (|f|_{Hdot^{-beta-tg}} + |f|_{Hdot^{-beta}})^{1-theta}
  double ratio = 0.0;
  double theta = 0.0;
};

/// Evaluate both sides of the mixed interpolation bound
///   |f|_{Hdot^{-alpha}} <= C |f|_{H^{-gamma}}^theta
///       ( |f|_{Hdot^{-beta - theta*gamma/(1-theta)}} + |f|_{Hdot^{-beta}} )^{1-theta}
/// with alpha = theta*gamma + (1-theta)*beta.  Splitting the frequency plane
/// at |xi| = 1 and bounding (1+|xi|^2)/|xi|^2 <= 2 below it gives
/// C = 2^{theta*gamma/2}; the tests gate on the looser 2^{theta*gamma/(1-theta)}.
inline InterpolationReport interpolation_check(const SpectralField& F, double gamma,
                                               double alpha, double beta) {
  if (!(0.0 < gamma && gamma < alpha && alpha < beta))
    throw Error("interpolation_check: need 0 < gamma < alpha < beta");
  detail::require_mean_zero_spectral(F, "interpolation_check");
  InterpolationReport r;
  r.theta = (beta - alpha) / (beta - gamma);
  double tail_order = beta + r.theta * gamma / (1.0 - r.theta);
  r.lhs = sobolev_norm(F, NormSpec::homogeneous(-alpha));
  double h_gamma = sobolev_norm(F, NormSpec::inhomogeneous(-gamma));
  double h_tail = sobolev_norm(F, NormSpec::homogeneous(-tail_order));
  double h_beta = sobolev_norm(F, NormSpec::homogeneous(-beta));
  r.rhs = std::pow(h_gamma, r.theta) * std::pow(h_tail + h_beta, 1.0 - r.theta);
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

inline InterpolationReport interpolation_check(const ScalarField& f, double gamma,
                                               double alpha, double beta) {
  return interpolation_check(forward_transform(f), gamma, alpha, beta);
}

}  // namespace tnlab
