#pragma once

#include <cmath>
#include <string>

#include "tnlab/grid.hpp"
#include "tnlab/fourier.hpp"

namespace tnlab {

/// Built-in initial profiles.  `bump` is smooth and compactly supported;
/// `singular` is |x-x0|^{-beta} cut off at `radius`, which lies in L^p \ L^2
/// for beta in (d/2, d/p).  The grid cannot represent the singularity, so
/// the center sample is capped at its cell average (equal-area disk rule in
/// d = 2, exact interval average in d = 1).
struct InitialData {
  std::string family = "bump";  // "bump" | "singular"
  double amplitude = 1.0;
  double radius = 1.0;
  double beta = 1.15;  // singular exponent

  void validate(int dim, double p) const {
    if (family != "bump" && family != "singular")
      throw Error("InitialData: unknown family '" + family + "'");
    if (!(radius > 0.0) || !(amplitude != 0.0))
      throw Error("InitialData: radius and amplitude must be nonzero");
    if (family == "singular") {
      double lo = 0.5 * dim, hi = dim / p;
      if (!(beta > lo && beta < hi))
        throw ParameterOutOfRange(
            "InitialData: singular exponent beta must lie in (d/2, d/p) = (" +
            std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
  }
};

namespace detail {

inline double periodic_offset(double x, double x0, double L) {
  double d = x - x0;
  d -= L * std::round(d / L);
  return d;
}

inline double singular_cap(int dim, double h, double beta) {
  if (dim == 2) {
    // Average of r^{-beta} over the disk of the cell's area, radius h/sqrt(pi).
    double R = h / std::sqrt(M_PI);
    return (2.0 * M_PI / (h * h)) * std::pow(R, 2.0 - beta) / (2.0 - beta);
  }
  // d = 1: exact average over [-h/2, h/2].
  return std::pow(0.5 * h, -beta) / (1.0 - beta);
}

}  // namespace detail

/// Sample the profile centered at the box midpoint (a grid point, so the
/// singular cap applies to exactly one sample).
inline ScalarField make_initial_field(const Grid& grid, const InitialData& init) {
  ScalarField f(grid);
  double L = grid.box_length;
  double x0 = grid.spacing() * (grid.points_per_dim / 2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto p = grid.point(k);
    double dx = detail::periodic_offset(p[0], x0, L);
    double dy = grid.dim == 2 ? detail::periodic_offset(p[1], x0, L) : 0.0;
    double r = std::hypot(dx, dy);
    if (r >= init.radius) continue;
    if (init.family == "bump") {
      double s = r / init.radius;
      f.values[k] = init.amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
    } else {
      double cap = detail::singular_cap(grid.dim, grid.spacing(), init.beta);
      double v = r > 0.0 ? std::pow(r, -init.beta) : cap;
      f.values[k] = init.amplitude * std::min(v, cap);
    }
  }
  return f;
}

/// Subtract the lattice mean exactly (spectral zero mode set to 0).
inline void remove_mean(SpectralField& F) { F.coeffs[0] = complex(0.0); }

}  // namespace tnlab
