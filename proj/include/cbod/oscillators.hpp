#pragma once

// Exact normal-mode and Born-Oppenheimer solutions of the coupled oscillator pair.

#include "cbod/gaussian.hpp"
#include "cbod/params.hpp"

#include <array>
#include <span>
#include <vector>

namespace cbod {

/// Normal modes after the canonical rescaling x1 = (mS/mF)^{1/4} xS, x2 = (mF/mS)^{1/4} xF and the
/// rotation y = R(alpha) x, with y1 = cos(a) x1 - sin(a) x2 and y2 = sin(a) x1 + cos(a) x2.
struct NormalModeFrame {
  double alpha = 0.0;
  double mu = 1.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;

  /// Linear map y = M x from lab coordinates (xS, xF) to mode coordinates.
  Eigen::Matrix2d lab_to_modes(double mS, double mF) const;
};

/// Frequency and its first two time derivatives.
struct ModeRates {
  double omega = 0.0;
  double omegaDot = 0.0;
  double omegaDDot = 0.0;
};

/// Eigen-decomposition of the mass-scaled spring matrix [[a, -c], [-c, b]] with its time derivatives.
/// Mode 1 is the stiffer mode; for c == 0 the modes keep the coordinate labels (alpha = 0).
struct ModeSprings {
  double alpha = 0.0;
  RampValue kappa1;
  RampValue kappa2;
};
ModeSprings decompose_springs(const RampValue& a, const RampValue& b, const RampValue& c);

/// Diagonal entries a = sqrt(mF/mS) kS and b = sqrt(mS/mF) kF, plus the coupling c, of the mass-scaled
/// spring matrix for arbitrary (possibly CD-modified) slow and fast springs.
std::array<RampValue, 3> mass_scaled_springs(double mS, double mF, const RampValue& kS, const RampValue& kF,
                                             const RampValue& kI);

/// omega = sqrt(kappa/m) and its derivatives from a spring value with derivatives.
ModeRates frequency_rates(const RampValue& kappa, double mass);

NormalModeFrame normal_mode_frame(const OscillatorParams& p, double t);
std::array<ModeRates, 2> normal_mode_rates(const OscillatorParams& p, double t);

/// alpha(t) on the given times, shifted by multiples of pi so it is continuous.
std::vector<double> unwrap_mode_angles(const OscillatorParams& p, std::span<const double> times);

/// Ground state in lab coordinates together with its energy.
struct GroundState {
  GaussianState2D state;
  double energy = 0.0;
};

GroundState exact_ground_state(const OscillatorParams& p, double t);

/// epsilon_ij = hbar omega1 (i + 1/2) + hbar omega2 (j + 1/2).
double exact_energy(const OscillatorParams& p, double t, int i, int j);

/// Fast coordinate xT = xF - slope * xS and effective slow spring kappaS' = kappaS - kI^2/kappaF.
struct BOAFrame {
  double slope = 0.0;
  double kappaSPrime = 0.0;
  double omegaS = 0.0;
  double omegaF = 0.0;
};

BOAFrame boa_frame(const OscillatorParams& p, double t);

struct BOARates {
  ModeRates slow;
  ModeRates fast;
  RampValue kappaSPrime;
};
BOARates boa_rates(const OscillatorParams& p, double t);

/// phi_0(xT) psi_0(xS) in lab coordinates, energy hbar (omegaS + omegaF) / 2.
GroundState boa_ground_state(const OscillatorParams& p, double t);

/// |<Psi_exact|Psi_BOA>|^2 of the ground states at time t.
double static_fidelity(const OscillatorParams& p, double t);

struct GeometricQuantities {
  double berryConnection = 0.0;
  double geometricTensor = 0.0;
};

/// Berry connection and quantum geometric tensor of the fast ground state with respect to xS.
GeometricQuantities geometric_quantities(const OscillatorParams& p, double t);

} // namespace cbod
