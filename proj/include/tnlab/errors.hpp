#pragma once

#include <stdexcept>
#include <string>

namespace tnlab {

/// Base class for all library errors so callers can catch them uniformly.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Spectral coefficients fail the conjugate-pair symmetry required of a real
/// field. Signals an upstream bug, not bad user input.
class HermitianViolation : public Error {
 public:
  using Error::Error;
};

/// Adaptive radial quadrature could not reach the requested tolerance.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// The grid's maximum wavenumber does not cover the support of the spectral
/// density; the noise band cannot be represented.
class UnresolvedSpectrum : public Error {
 public:
  using Error::Error;
};

/// Advective displacement per step exceeds the configured Courant limit.
class CflViolation : public Error {
 public:
  using Error::Error;
};

/// Homogeneous negative-order norm (or inverse fractional Laplacian)
/// requested for a field whose lattice mean is not zero.
class MeanNotZero : public Error {
 public:
  using Error::Error;
};

/// Vorticity with nonzero total mass cannot be inverted on the torus.
class NonzeroMeanVorticity : public Error {
 public:
  using Error::Error;
};

/// Configuration violates a hypothesis window of the rate predictions.
class ParameterOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Fewer than three usable points for a log-log fit.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

/// The accumulated convolution no longer matches f - fbar; scheme bug.
class IdentityDefect : public Error {
 public:
  using Error::Error;
};

/// Solver viscosity does not match the noise intensity it must balance.
class KappaMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace tnlab
