#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "tnlab/errors.hpp"

namespace tnlab {

using complex = std::complex<double>;

/// Uniform periodic box [0,L)^d, d in {1,2}, with N samples per dimension.
///
/// Real samples live at x_m = m*h, h = L/N.  Spectral coefficients live on
/// the integer wavenumber lattice j in {-N/2,...,N/2-1}^d with physical
/// wavenumber xi_j = (2*pi/L)*j, stored in standard FFT order (index k maps
/// to j = k for k < N/2 and j = k-N otherwise, fastest axis last).
struct Grid {
  int dim = 2;
  double box_length = 2.0 * M_PI;
  int points_per_dim = 0;

  Grid() = default;
  Grid(int d, double L, int N) : dim(d), box_length(L), points_per_dim(N) {
    if (d != 1 && d != 2) throw Error("Grid: dim must be 1 or 2");
    if (!(L > 0.0)) throw Error("Grid: box_length must be positive");
    if (N < 4 || N % 2 != 0) throw Error("Grid: N must be even and >= 4");
  }

  std::size_t size() const {
    std::size_t n = static_cast<std::size_t>(points_per_dim);
    return dim == 1 ? n : n * n;
  }

  double spacing() const { return box_length / points_per_dim; }

  /// Wavenumber lattice step 2*pi/L.
  double dk() const { return 2.0 * M_PI / box_length; }

  /// Largest radial wavenumber representable on the lattice, (2*pi/L)*(N/2).
  double max_wavenumber() const { return dk() * (points_per_dim / 2); }

  /// Cell volume of the wavenumber lattice, (2*pi/L)^d.
  double spectral_cell() const { return std::pow(dk(), dim); }

  double cell_volume() const { return std::pow(spacing(), dim); }

  double volume() const { return std::pow(box_length, dim); }

  /// Signed integer mode along one axis for storage index i.
  int mode_of(int i) const { return i < points_per_dim / 2 ? i : i - points_per_dim; }

  /// Storage index along one axis for signed mode j in [-N/2, N/2).
  int index_of(int j) const { return j >= 0 ? j : j + points_per_dim; }

  /// Decode a flat storage index into per-axis storage indices.
  std::array<int, 2> decode(std::size_t k) const {
    if (dim == 1) return {static_cast<int>(k), 0};
    int n = points_per_dim;
    return {static_cast<int>(k) / n, static_cast<int>(k) % n};
  }

  std::size_t encode(int i0, int i1) const {
    return dim == 1 ? static_cast<std::size_t>(i0)
                    : static_cast<std::size_t>(i0) * points_per_dim + i1;
  }

  /// Flat index of the conjugate mode -j of flat index k.
  std::size_t conjugate_index(std::size_t k) const {
    auto [i0, i1] = decode(k);
    int n = points_per_dim;
    int c0 = (n - i0) % n;
    int c1 = (n - i1) % n;
    return encode(c0, c1);
  }

  /// Physical wavenumber components of flat spectral index k.
  std::array<double, 2> wavenumber(std::size_t k) const {
    auto [i0, i1] = decode(k);
    return {dk() * mode_of(i0), dim == 2 ? dk() * mode_of(i1) : 0.0};
  }

  double wavenumber_sq(std::size_t k) const {
    auto [x0, x1] = wavenumber(k);
    return x0 * x0 + x1 * x1;
  }

  /// Real-space coordinates of flat sample index k.
  std::array<double, 2> point(std::size_t k) const {
    auto [i0, i1] = decode(k);
    return {spacing() * i0, dim == 2 ? spacing() * i1 : 0.0};
  }

  bool operator==(const Grid& o) const {
    return dim == o.dim && box_length == o.box_length &&
           points_per_dim == o.points_per_dim;
  }
};

/// Real-space samples of a scalar quantity on a Grid.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw Error("ScalarField: size mismatch");
  }

  /// Lattice mean (1/L^d) * h^d * sum f.
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.cell_volume() / grid.volume();
  }
};

/// Fourier coefficients on the wavenumber lattice, FFT storage order.
struct SpectralField {
  Grid grid;
  std::vector<complex> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), coeffs(g.size(), complex(0.0)) {}

  complex& at_mode(int j0, int j1 = 0) {
    return coeffs[grid.encode(grid.index_of(j0), grid.dim == 2 ? grid.index_of(j1) : 0)];
  }
  const complex& at_mode(int j0, int j1 = 0) const {
    return coeffs[grid.encode(grid.index_of(j0), grid.dim == 2 ? grid.index_of(j1) : 0)];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs) m = std::max(m, std::abs(c));
    return m;
  }

  /// Largest conjugate-pair asymmetry, max_j |c(-j) - conj(c(j))|.
  double hermitian_defect() const {
    double defect = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      std::size_t kc = grid.conjugate_index(k);
      if (kc < k) continue;
      defect = std::max(defect, std::abs(coeffs[kc] - std::conj(coeffs[k])));
    }
    return defect;
  }
};

/// d scalar components sharing one grid.
struct VectorField {
  Grid grid;
  std::array<ScalarField, 2> comp;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g) {
    comp[0] = ScalarField(g);
    if (g.dim == 2) comp[1] = ScalarField(g);
  }

  /// Pointwise maximum Euclidean magnitude over the grid.
  double max_magnitude() const {
    double m = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double s = comp[0].values[k] * comp[0].values[k];
      if (grid.dim == 2) s += comp[1].values[k] * comp[1].values[k];
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }
};

}  // namespace tnlab
