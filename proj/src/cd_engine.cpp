#include "cbod/cd_engine.hpp"

#include "cbod/errors.hpp"
#include "cbod/oscillators.hpp"

#include <cmath>

namespace cbod {

namespace {

double squeeze(const ModeRates& r) {
  return -r.omegaDot / (4.0 * r.omega);
}

double transformed_sq(const ModeRates& r) {
  const double ratio = r.omegaDot / r.omega;
  return r.omega * r.omega - 0.75 * ratio * ratio + 0.5 * r.omegaDDot / r.omega;
}

} // namespace

std::array<SqueezeCD, 2> exact_cd(const OscillatorParams& p, double t) {
  const auto rates = normal_mode_rates(p, t);
  return {SqueezeCD{squeeze(rates[0]), Coordinate::mode1}, SqueezeCD{squeeze(rates[1]), Coordinate::mode2}};
}

std::array<double, 2> transformed_frequencies(const OscillatorParams& p, double t) {
  const auto rates = normal_mode_rates(p, t);
  return {transformed_sq(rates[0]), transformed_sq(rates[1])};
}

std::array<SqueezeCD, 2> cbod_cd(const OscillatorParams& p, double t) {
  const auto r = boa_rates(p, t);
  return {SqueezeCD{squeeze(r.slow), Coordinate::slow}, SqueezeCD{squeeze(r.fast), Coordinate::fastShifted}};
}

EffectiveSprings cbod_effective_springs(const OscillatorParams& p, double t) {
  const auto k = springs_at(p, t);
  const auto r = boa_rates(p, t);
  const auto& s = r.slow;
  const auto& f = r.fast;
  const double kI = k.kI.value;
  const double kF = k.kappaF.value;

  EffectiveSprings out;
  const double slowRatio = s.omegaDot / s.omega;
  const double fastRatio = f.omegaDot / f.omega;
  // The fast squeeze acts on xT = xF - (kI/kF) xS; absorbing it into pF leaves this xS^2 remainder.
  const double absorbed = p.mF * fastRatio * fastRatio * kI * kI / (4.0 * kF * kF);
  out.gammaS = k.kappaS.value - 0.75 * p.mS * slowRatio * slowRatio - absorbed + 0.5 * p.mS * s.omegaDDot / s.omega;
  out.gammaF = kF - 0.75 * p.mF * fastRatio * fastRatio + 0.5 * p.mF * f.omegaDDot / f.omega;
  out.realFrequency = out.gammaF > 0.0 && out.gammaS * out.gammaF > kI * kI;

  const auto wT = transformed_frequencies(p, t);
  out.omegaT1sq = wT[0];
  out.omegaT2sq = wT[1];
  return out;
}

Eigen::MatrixXcd spectral_cd_matrix(const Eigen::MatrixXcd& H0, const Eigen::MatrixXcd& dH0dt, double hbar) {
  if (H0.rows() != H0.cols() || dH0dt.rows() != H0.rows() || dH0dt.cols() != H0.cols()) {
    throw DomainError("spectral_cd_matrix needs square matrices of equal size");
  }
  const Eigen::Index n = H0.rows();
  if (n <= 1) {
    return Eigen::MatrixXcd::Zero(n, n);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H0);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of H0 failed");
  }
  const Eigen::VectorXd& e = eig.eigenvalues();
  const Eigen::MatrixXcd& V = eig.eigenvectors();

  const double range = e(n - 1) - e(0);
  const double tol = 1e-9 * range;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double gap = e(i + 1) - e(i);
    if (range == 0.0 || gap < tol) {
      throw DegeneracyError(static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1), gap);
    }
  }

  Eigen::MatrixXcd M = V.adjoint() * dH0dt * V;
  const cplx ih(0.0, hbar);
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index row = 0; row < n; ++row) {
      M(row, col) = row == col ? cplx(0.0) : ih * M(row, col) / (e(col) - e(row));
    }
  }
  return V * M * V.adjoint();
}

} // namespace cbod
