#include "cbod/gaussian.hpp"

#include "cbod/errors.hpp"

#include <cmath>
#include <numbers>

namespace cbod {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(det M) for complex symmetric M with positive-definite real part, taken as the product of
// principal square roots of the eigenvalues (each has positive real part), which is the branch the
// Gaussian integral picks.
cplx sqrt_det(const Eigen::Matrix2cd& M) {
  const cplx tr = M.trace();
  const cplx det = M.determinant();
  const cplx disc = std::sqrt(tr * tr / 4.0 - det);
  const cplx l1 = tr / 2.0 + disc;
  const cplx l2 = tr / 2.0 - disc;
  return std::sqrt(l1) * std::sqrt(l2);
}

} // namespace

GaussianState1D GaussianState1D::normalized(cplx quad, double phase) {
  if (!(quad.real() > 0.0)) {
    throw DomainError("1D Gaussian needs a positive real quadratic coefficient");
  }
  return {quad, 0.25 * std::log(quad.real() / kPi), phase};
}

cplx GaussianState1D::value(double x) const {
  return std::exp(cplx(logNorm, phase) - 0.5 * quad * x * x);
}

double GaussianState1D::norm() const {
  return std::exp(2.0 * logNorm) * std::sqrt(kPi / quad.real());
}

GaussianState2D GaussianState2D::normalized(const Eigen::Matrix2cd& quad, double phase) {
  GaussianState2D s;
  s.quad = 0.5 * (quad + quad.transpose());
  if (!s.normalizable()) {
    throw DomainError("2D Gaussian needs a positive-definite real quadratic form");
  }
  const double detRe = s.quad.real().determinant();
  s.logNorm = 0.25 * std::log(detRe) - 0.5 * std::log(kPi);
  s.phase = phase;
  return s;
}

cplx GaussianState2D::value(double x, double y) const {
  const Eigen::Vector2d v(x, y);
  const cplx form = v.cast<cplx>().dot(quad * v.cast<cplx>());
  return std::exp(cplx(logNorm, phase) - 0.5 * form);
}

bool GaussianState2D::normalizable() const {
  const Eigen::Matrix2d re = quad.real();
  return re(0, 0) > 0.0 && re.determinant() > 0.0;
}

double GaussianState2D::norm() const {
  return std::exp(2.0 * logNorm) * kPi / std::sqrt(quad.real().determinant());
}

cplx overlap(const GaussianState1D& a, const GaussianState1D& b) {
  const cplx sum = std::conj(a.quad) + b.quad;
  const cplx pref = std::exp(cplx(a.logNorm + b.logNorm, b.phase - a.phase));
  return pref * std::sqrt(2.0 * kPi / sum);
}

cplx overlap(const GaussianState2D& a, const GaussianState2D& b) {
  const Eigen::Matrix2cd sum = a.quad.conjugate() + b.quad;
  const cplx pref = std::exp(cplx(a.logNorm + b.logNorm, b.phase - a.phase));
  return pref * 2.0 * kPi / sqrt_det(sum);
}

double fidelity(const GaussianState1D& a, const GaussianState1D& b) {
  return 2.0 * std::sqrt(a.quad.real() * b.quad.real()) / std::abs(std::conj(a.quad) + b.quad);
}

double fidelity(const GaussianState2D& a, const GaussianState2D& b) {
  const Eigen::Matrix2cd sum = a.quad.conjugate() + b.quad;
  const double num = 4.0 * std::sqrt(a.quad.real().determinant() * b.quad.real().determinant());
  return num / std::abs(sum.determinant());
}

GaussianState2D pull_back(const GaussianState2D& zState, const Eigen::Matrix2d& M) {
  GaussianState2D out;
  const Eigen::Matrix2cd Mc = M.cast<cplx>();
  out.quad = Mc.transpose() * zState.quad * Mc;
  out.quad = 0.5 * (out.quad + out.quad.transpose());
  out.logNorm = zState.logNorm + 0.5 * std::log(std::abs(M.determinant()));
  out.phase = zState.phase;
  return out;
}

GaussianState2D product_state(const GaussianState1D& a, const GaussianState1D& b) {
  GaussianState2D s;
  s.quad << a.quad, 0.0, 0.0, b.quad;
  s.logNorm = a.logNorm + b.logNorm;
  s.phase = a.phase + b.phase;
  return s;
}

Eigen::Vector2d marginal_widths(const GaussianState2D& s) {
  // |psi|^2 ~ exp(-x^T Re(A) x): covariance is Re(A)^{-1} / 2.
  const Eigen::Matrix2d cov = 0.5 * s.quad.real().inverse();
  return {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1))};
}

} // namespace cbod
