#pragma once

// Independent reference computations shared by the unit tests.

#include "cbod/params.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace oracle {

inline Eigen::Matrix2d mass_matrix(const cbod::OscillatorParams& p) {
  return Eigen::Vector2d(p.mS, p.mF).asDiagonal();
}

inline Eigen::Matrix2d spring_matrix(double kS, double kF, double kI) {
  Eigen::Matrix2d K;
  K << kS, -kI, -kI, kF;
  return K;
}

inline Eigen::Matrix2d spring_matrix(const cbod::OscillatorParams& p, double t) {
  const auto k = cbod::springs_at(p, t);
  return spring_matrix(k.kappaS.value, k.kappaF.value, k.kI.value);
}

/// omega^2 from K v = omega^2 M v, ascending.
inline Eigen::Vector2d squared_frequencies(const Eigen::Matrix2d& K, const Eigen::Matrix2d& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> es(K, M);
  return es.eigenvalues();
}

/// Ground-state quadratic form M^{1/2} (M^{-1/2} K M^{-1/2})^{1/2} M^{1/2} / hbar.
inline Eigen::Matrix2d ground_quad(const Eigen::Matrix2d& K, const Eigen::Matrix2d& M, double hbar) {
  const Eigen::Matrix2d Mh = M.diagonal().cwiseSqrt().asDiagonal();
  const Eigen::Matrix2d Mi = M.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::Matrix2d W = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Mi * K * Mi).operatorSqrt();
  return Mh * W * Mh / hbar;
}

/// |<a|b>|^2 for real-quadratic normalized Gaussians: 4 sqrt(det A det B) / det(A + B).
inline double real_fidelity(const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
  return 4.0 * std::sqrt(A.determinant() * B.determinant()) / (A + B).determinant();
}

} // namespace oracle
