#pragma once

// Counterdiabatic terms for the coupled oscillators and a generic spectral builder.

#include "cbod/params.hpp"

#include <Eigen/Dense>

#include <array>

namespace cbod {

enum class Coordinate { mode1, mode2, slow, fastShifted };

/// coeff * {q, p} acting on the labelled coordinate, coeff = -omegaDot / (4 omega).
struct SqueezeCD {
  double coeff = 0.0;
  Coordinate coordinate = Coordinate::mode1;
};

struct EffectiveSprings {
  double gammaS = 0.0;
  double gammaF = 0.0;
  double omegaT1sq = 0.0;
  double omegaT2sq = 0.0;
  /// gammaF > 0 and gammaS * gammaF > kI^2, i.e. both normal modes of the gamma Hamiltonian oscillate.
  bool realFrequency = true;
};

std::array<SqueezeCD, 2> exact_cd(const OscillatorParams& p, double t);

/// omegaT^2 = omega^2 - 3 omegaDot^2 / (4 omega^2) + omegaDDot / (2 omega) for both normal modes.
std::array<double, 2> transformed_frequencies(const OscillatorParams& p, double t);

/// Slow term on {xS, pS} from omegaS(kappaS'), fast term on {xT, pF} from omegaF(kappaF).
std::array<SqueezeCD, 2> cbod_cd(const OscillatorParams& p, double t);

/// Local spring constants of the CBOD Hamiltonian after the squeezing terms are rotated away.
/// The coupling -kI xS xF is unchanged.
EffectiveSprings cbod_effective_springs(const OscillatorParams& p, double t);

/// H1 = i hbar sum_{m != n} P_m dH0 P_n / (e_n - e_m) in the basis H0 is given in.
/// Throws DegeneracyError when two eigenvalues are closer than 1e-9 of the spectral range.
Eigen::MatrixXcd spectral_cd_matrix(const Eigen::MatrixXcd& H0, const Eigen::MatrixXcd& dH0dt, double hbar = 1.0);

} // namespace cbod
