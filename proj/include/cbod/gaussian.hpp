#pragma once

// Gaussian wavefunctions psi(x) = exp(logNorm + i*phase - x^T A x / 2) with complex symmetric A.

#include <Eigen/Dense>

#include <complex>

namespace cbod {

using cplx = std::complex<double>;

struct GaussianState1D {
  cplx quad{1.0, 0.0};
  double logNorm = 0.0;
  double phase = 0.0;

  /// Unit-norm state with the given quadratic coefficient. Requires Re(quad) > 0.
  static GaussianState1D normalized(cplx quad, double phase = 0.0);

  cplx value(double x) const;
  double norm() const;
};

struct GaussianState2D {
  Eigen::Matrix2cd quad = Eigen::Matrix2cd::Identity();
  double logNorm = 0.0;
  double phase = 0.0;

  /// Unit-norm state. Throws DomainError if Re(quad) is not positive definite.
  static GaussianState2D normalized(const Eigen::Matrix2cd& quad, double phase = 0.0);

  cplx value(double x, double y) const;
  bool normalizable() const;
  double norm() const;
};

/// <a|b> in closed form.
cplx overlap(const GaussianState1D& a, const GaussianState1D& b);
cplx overlap(const GaussianState2D& a, const GaussianState2D& b);

/// |<a|b>|^2 for states normalized to one; cheaper and phase-free.
double fidelity(const GaussianState1D& a, const GaussianState1D& b);
double fidelity(const GaussianState2D& a, const GaussianState2D& b);

/// State expressed in coordinates z is re-expressed in x, where z = M x.
/// The result is again unit-norm when the input was.
GaussianState2D pull_back(const GaussianState2D& zState, const Eigen::Matrix2d& M);

/// Product of two 1D Gaussians, psi(z1, z2) = a(z1) b(z2).
GaussianState2D product_state(const GaussianState1D& a, const GaussianState1D& b);

/// Standard deviation of |psi|^2 along each coordinate axis.
Eigen::Vector2d marginal_widths(const GaussianState2D& s);

} // namespace cbod
