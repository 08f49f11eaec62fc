#pragma once

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <utility>

#include "tnlab/grid.hpp"

namespace tnlab {

// Transform convention (symmetric in (2*pi)^{d/2}):
//   coeffs(j) = (2*pi)^{-d/2} * h^d * sum_x e^{-i x.xi_j} f(x)
//   f(x)      = (2*pi)^{ d/2} * L^{-d} * sum_j coeffs(j) e^{i x.xi_j}
// so the discrete pair is the trapezoidal quadrature of the continuous one.
// Grid-level Parseval with these factors reads
//   h^d sum_x f(x)^2 = (2*pi/L)^d sum_j |coeffs(j)|^2,
// i.e. the spectral sum uses one wavenumber-lattice cell per mode.

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan p) const { if (p) fftw_destroy_plan(p); }
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Per-thread FFT engine for one grid.  Owns its FFTW buffers and plans
/// (FFTW_ESTIMATE only: plan selection must not depend on runtime timing,
/// otherwise separate processes could round differently and break the
/// byte-identical reproducibility contract).  Not shareable across threads;
/// create one workspace per worker.
class FourierWorkspace {
 public:
  explicit FourierWorkspace(const Grid& g) : grid_(g) {
    std::size_t n = g.size();
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    if (g.dim == 1) {
      fwd_ = fftw_plan_dft_1d(g.points_per_dim, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_1d(g.points_per_dim, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_2d(g.points_per_dim, g.points_per_dim, in_, out_,
                              FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_2d(g.points_per_dim, g.points_per_dim, in_, out_,
                              FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }

  ~FourierWorkspace() {
    std::lock_guard<std::mutex> lock(detail::planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }

  FourierWorkspace(const FourierWorkspace&) = delete;
  FourierWorkspace& operator=(const FourierWorkspace&) = delete;

  const Grid& grid() const { return grid_; }

  /// Discrete forward transform per the convention above.
  SpectralField forward(const ScalarField& f) {
    SpectralField F(grid_);
    forward_into(f, F);
    return F;
  }

  /// Forward transform into an existing field (no allocation).
  void forward_into(const ScalarField& f, SpectralField& F) {
    check_grid(f.grid);
    std::size_t n = grid_.size();
    for (std::size_t k = 0; k < n; ++k) {
      in_[k][0] = f.values[k];
      in_[k][1] = 0.0;
    }
    fftw_execute(fwd_);
    double scale = std::pow(2.0 * M_PI, -0.5 * grid_.dim) * grid_.cell_volume();
    F.grid = grid_;
    F.coeffs.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      F.coeffs[k] = complex(out_[k][0], out_[k][1]) * scale;
  }

  /// Inverse transform.  Requires conjugate symmetry (the field must
  /// represent a real function); throws HermitianViolation otherwise.
  ScalarField inverse(const SpectralField& F) {
    check_grid(F.grid);
    double defect = F.hermitian_defect();
    double scale_ref = F.max_abs();
    if (defect > 1e-10 * std::max(scale_ref, 1e-300))
      throw HermitianViolation("inverse_transform: conjugate symmetry violated");
    ScalarField f(grid_);
    inverse_raw(F.coeffs.data(), f.values.data(), nullptr);
    return f;
  }

  /// Inverse-transform two Hermitian coefficient arrays with one FFT by
  /// packing A + iB; A lands in the real part, B in the imaginary part.
  /// Symmetry of the inputs is the caller's responsibility.
  void inverse_pair(const SpectralField& A, const SpectralField& B,
                    ScalarField& a, ScalarField& b) {
    check_grid(A.grid);
    check_grid(B.grid);
    std::size_t n = grid_.size();
    for (std::size_t k = 0; k < n; ++k) {
      complex z = A.coeffs[k] + complex(0.0, 1.0) * B.coeffs[k];
      in_[k][0] = z.real();
      in_[k][1] = z.imag();
    }
    fftw_execute(bwd_);
    double scale = std::pow(2.0 * M_PI, 0.5 * grid_.dim) / grid_.volume();
    a.grid = grid_;
    b.grid = grid_;
    a.values.resize(n);
    b.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      a.values[k] = out_[k][0] * scale;
      b.values[k] = out_[k][1] * scale;
    }
  }

 private:
  void inverse_raw(const complex* coeffs, double* re, double* im) {
    std::size_t n = grid_.size();
    for (std::size_t k = 0; k < n; ++k) {
      in_[k][0] = coeffs[k].real();
      in_[k][1] = coeffs[k].imag();
    }
    fftw_execute(bwd_);
    double scale = std::pow(2.0 * M_PI, 0.5 * grid_.dim) / grid_.volume();
    for (std::size_t k = 0; k < n; ++k) {
      re[k] = out_[k][0] * scale;
      if (im) im[k] = out_[k][1] * scale;
    }
  }

  void check_grid(const Grid& g) const {
    if (!(g == grid_)) throw Error("FourierWorkspace: grid mismatch");
  }

  Grid grid_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// One-shot forward transform (builds a workspace; fine off the hot path).
inline SpectralField forward_transform(const ScalarField& f) {
  FourierWorkspace ws(f.grid);
  return ws.forward(f);
}

inline ScalarField inverse_transform(const SpectralField& F) {
  FourierWorkspace ws(F.grid);
  return ws.inverse(F);
}

/// Diagonal multiplier e^{-kappa |xi|^2 t}; applying it advances the heat
/// semigroup exactly on the grid.
inline SpectralField heat_multiplier(const Grid& grid, double kappa, double t) {
  if (!(kappa > 0.0)) throw Error("heat_multiplier: kappa must be positive");
  if (t < 0.0) throw Error("heat_multiplier: t must be nonnegative");
  SpectralField m(grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    m.coeffs[k] = std::exp(-kappa * grid.wavenumber_sq(k) * t);
  return m;
}

/// Two-thirds-rule mask: 1 where 3*|j_i| <= N on every axis, else 0.
inline SpectralField dealias_mask(const Grid& grid) {
  SpectralField m(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto [i0, i1] = grid.decode(k);
    int j0 = std::abs(grid.mode_of(i0));
    int j1 = grid.dim == 2 ? std::abs(grid.mode_of(i1)) : 0;
    bool keep = 3 * j0 <= grid.points_per_dim && 3 * j1 <= grid.points_per_dim;
    m.coeffs[k] = keep ? 1.0 : 0.0;
  }
  return m;
}

inline void apply_multiplier(SpectralField& f, const SpectralField& m) {
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) f.coeffs[k] *= m.coeffs[k];
}

}  // namespace tnlab
