#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tnlab/errors.hpp"

namespace tnlab {

/// Radial spectral density g(|xi|) of a homogeneous, isotropic,
/// divergence-free noise.  The matrix spectral density is g(xi) * P_xi with
/// P_xi the projection orthogonal to xi; since P_xi has unit operator norm,
/// scalar L^r norms of g stand in for the matrix norms throughout.
struct CovarianceSpec {
  enum class Family { kraichnan, band, tabulated, zero };

  int dim = 2;
  Family family = Family::zero;

  // kraichnan(ell, lambda): c * ell^{-lambda} * rho^{-(dim+lambda)} on the
  // annulus 1/ell <= rho <= 2/ell, with c normalizing the L^1 mass to one.
  double ell = 0.0;
  double lambda = 1.0;
  double kraichnan_constant = 0.0;

  // band(a, b, height): constant on a <= rho <= b.
  double band_lo = 0.0;
  double band_hi = 0.0;
  double band_height = 0.0;

  // tabulated: piecewise-linear in rho, zero outside the table range.
  std::vector<double> table_rho;
  std::vector<double> table_g;

  // mollified: damping factor e^{-rho^2 / mollify_scale} on top of any of
  // the above shapes.
  double mollify_scale = std::numeric_limits<double>::infinity();

  double support_lo = 0.0;
  double support_hi = 0.0;

  /// Radial profile G(rho) >= 0.
  double density(double rho) const {
    if (rho < support_lo || rho > support_hi) return 0.0;
    double base = 0.0;
    switch (family) {
      case Family::zero:
        return 0.0;
      case Family::kraichnan:
        base = kraichnan_constant * std::pow(ell, -lambda) *
               std::pow(rho, -(dim + lambda));
        break;
      case Family::band:
        base = band_height;
        break;
      case Family::tabulated:
        base = table_lookup(rho);
        break;
    }
    if (std::isfinite(mollify_scale))
      base *= std::exp(-rho * rho / mollify_scale);
    return base;
  }

  double density_vec(const double* xi) const {
    double r2 = xi[0] * xi[0] + (dim == 2 ? xi[1] * xi[1] : 0.0);
    return density(std::sqrt(r2));
  }

  std::string family_name() const {
    std::string base;
    switch (family) {
      case Family::kraichnan: base = "kraichnan"; break;
      case Family::band: base = "band"; break;
      case Family::tabulated: base = "tabulated"; break;
      case Family::zero: base = "zero"; break;
    }
    return std::isfinite(mollify_scale) ? "mollified:" + base : base;
  }

 private:
  double table_lookup(double rho) const {
    if (table_rho.empty()) return 0.0;
    auto it = std::upper_bound(table_rho.begin(), table_rho.end(), rho);
    if (it == table_rho.begin()) return table_g.front();
    if (it == table_rho.end()) return table_g.back();
    std::size_t hi = static_cast<std::size_t>(it - table_rho.begin());
    std::size_t lo = hi - 1;
    double t = (rho - table_rho[lo]) / (table_rho[hi] - table_rho[lo]);
    return table_g[lo] + t * (table_g[hi] - table_g[lo]);
  }
};

namespace quadrature {

/// Surface area of the unit sphere in R^d.
inline double sphere_area(int dim) {
  return dim == 1 ? 2.0 : 2.0 * M_PI;
}

namespace detail {

inline double simpson(const std::function<double(double)>&, double a, double b,
                      double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol,
                    int depth) {
  if (depth > 48)
    throw QuadratureFailure("adaptive quadrature: recursion limit reached");
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, m, fa, flm, fm);
  double right = simpson(f, m, b, fm, frm, fb);
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Simpson integral of f over [a,b], relative tolerance `rel_tol`
/// (mixed with a tiny absolute floor so that zero integrands are exact).
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-9) {
  if (!(b > a)) return 0.0;
  // Seed panels at a fixed resolution so narrow features are not skipped.
  const int panels = 64;
  double h = (b - a) / panels;
  double total = 0.0;
  double coarse = 0.0;
  for (int i = 0; i < panels; ++i) coarse += std::abs(f(a + (i + 0.5) * h)) * h;
  double tol_abs = std::max(coarse, 1e-300) * rel_tol;
  for (int i = 0; i < panels; ++i) {
    double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
    double f0 = f(x0), f1 = f(x1), fm = f(xm);
    double whole = detail::simpson(f, x0, x1, f0, fm, f1);
    total += detail::adapt(f, x0, x1, f0, fm, f1, whole, tol_abs / panels, 0);
  }
  return total;
}

}  // namespace quadrature

/// Radial L^r norm of the spectral density over R^d,
///   ||g||_r = ( area(S^{d-1}) * int G(rho)^r rho^{d-1} drho )^{1/r},
/// computed by adaptive quadrature on the (finite) support.  r = infinity
/// returns the sup, located by dense sampling with endpoint refinement.
inline double spectral_norm(const CovarianceSpec& spec, double r) {
  if (!(r >= 1.0)) throw Error("spectral_norm: r must be >= 1");
  if (spec.family == CovarianceSpec::Family::zero ||
      spec.support_hi <= spec.support_lo)
    return 0.0;
  if (std::isinf(r)) {
    const int samples = 8192;
    double lo = spec.support_lo, hi = spec.support_hi;
    double m = 0.0;
    for (int i = 0; i <= samples; ++i)
      m = std::max(m, spec.density(lo + (hi - lo) * i / samples));
    return m;
  }
  double area = quadrature::sphere_area(spec.dim);
  auto integrand = [&](double rho) {
    return std::pow(spec.density(rho), r) * std::pow(rho, spec.dim - 1);
  };
  double integral = quadrature::integrate(integrand, spec.support_lo,
                                          spec.support_hi, 1e-9);
  return std::pow(area * integral, 1.0 / r);
}

/// Effective viscosity kappa = (d-1)/(2d) * ||g||_1 induced by the noise.
inline double kappa(const CovarianceSpec& spec) {
  double l1 = spectral_norm(spec, 1.0);
  return (spec.dim - 1) / (2.0 * spec.dim) * l1;
}

/// Kraichnan band spectrum at correlation scale ell, normalized to unit
/// L^1 mass by quadrature (the closed form lambda/(area*(1-2^{-lambda}))
/// serves as an independent cross-check in the tests).
inline CovarianceSpec kraichnan_spec(int dim, double ell, double lambda) {
  if (!(ell > 0.0 && ell < 1.0)) throw Error("kraichnan: ell must be in (0,1)");
  if (!(lambda > 0.0)) throw Error("kraichnan: lambda must be positive");
  CovarianceSpec s;
  s.dim = dim;
  s.family = CovarianceSpec::Family::kraichnan;
  s.ell = ell;
  s.lambda = lambda;
  s.support_lo = 1.0 / ell;
  s.support_hi = 2.0 / ell;
  s.kraichnan_constant = 1.0;
  double mass = spectral_norm(s, 1.0);
  if (!(mass > 0.0)) throw QuadratureFailure("kraichnan: degenerate mass");
  s.kraichnan_constant = 1.0 / mass;
  return s;
}

inline CovarianceSpec band_spec(int dim, double lo, double hi, double height) {
  if (!(hi > lo && lo >= 0.0)) throw Error("band: need 0 <= lo < hi");
  CovarianceSpec s;
  s.dim = dim;
  s.family = CovarianceSpec::Family::band;
  s.band_lo = lo;
  s.band_hi = hi;
  s.band_height = height;
  s.support_lo = lo;
  s.support_hi = hi;
  return s;
}

inline CovarianceSpec zero_spec(int dim) {
  CovarianceSpec s;
  s.dim = dim;
  return s;
}

inline CovarianceSpec tabulated_spec(int dim, std::vector<double> rho,
                                     std::vector<double> g) {
  if (rho.size() != g.size() || rho.size() < 2)
    throw Error("tabulated: need >= 2 matching (rho, g) rows");
  for (std::size_t i = 1; i < rho.size(); ++i)
    if (!(rho[i] > rho[i - 1])) throw Error("tabulated: rho must increase");
  for (double v : g)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("tabulated: g must be finite and >= 0");
  CovarianceSpec s;
  s.dim = dim;
  s.family = CovarianceSpec::Family::tabulated;
  s.support_lo = rho.front();
  s.support_hi = rho.back();
  s.table_rho = std::move(rho);
  s.table_g = std::move(g);
  return s;
}

/// Gaussian high-frequency damping g(xi) -> g(xi) e^{-|xi|^2 / scale}.
/// Never increases any L^r norm, so kappa(mollify(s)) <= kappa(s).
inline CovarianceSpec mollify(const CovarianceSpec& spec, double scale) {
  if (!(scale > 0.0)) throw Error("mollify: scale must be positive");
  CovarianceSpec s = spec;
  if (std::isfinite(s.mollify_scale))
    s.mollify_scale = 1.0 / (1.0 / s.mollify_scale + 1.0 / scale);
  else
    s.mollify_scale = scale;
  return s;
}

}  // namespace tnlab
