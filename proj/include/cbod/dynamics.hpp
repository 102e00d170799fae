#pragma once

// Ermakov scaling dynamics and CBOD-driven evolution of the coupled oscillators.

#include "cbod/gaussian.hpp"
#include "cbod/params.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cbod {

/// Solution of  b'' + omega(t)^2 b = omega0^2 / b^3,  b(0) = 1, b'(0) = 0.
struct ErmakovSolution {
  std::vector<double> times;
  std::vector<double> b;
  std::vector<double> bdot;
  std::vector<double> phaseIntegral; // int_0^t dt' / b^2
  double omega0 = 0.0;
  double residual = 0.0;             // max |b'' + omega^2 b - omega0^2/b^3|, b'' by central differences
};

using FrequencySquared = std::function<double(double)>;

/// Fixed-step RK4. omegaSq may go negative (inverted oscillator); b crossing zero throws SingularityError.
ErmakovSolution solve_ermakov(const FrequencySquared& omegaSq, double omega0, double Tf, int steps);

/// Evolves `initial` (evolving under the static omega0 oscillator in the scaled frame) to the grid time t.
/// t must be one of sol.times.
GaussianState1D scaled_state(const GaussianState1D& initial, const ErmakovSolution& sol, double mass, double t,
                             double hbar = 1.0);

enum class ModeFrame {
  coupled,       // full quadratic propagation; exact for the gamma Hamiltonian
  instantaneous, // independent Ermakov per instantaneous normal mode of the gamma Hamiltonian
};

enum class InitialState { exact, boa };

struct EvolutionOptions {
  double stepsPerUnitTime = 1e4;
  int minSteps = 1000;
  int steps = 0; // overrides the two above when positive
  ModeFrame frame = ModeFrame::coupled;
  InitialState initial = InitialState::exact;
  bool refine = true; // double the steps while the residual exceeds residualTol
  double residualTol = 1e-6;
  int maxDoublings = 4;
};

struct ModeSummary {
  double omega0 = 0.0;
  double finalB = 1.0;
  double residual = 0.0; // relative to omega0^2
};

struct EvolutionResult {
  GaussianState2D finalState;
  double fidelity = 0.0;
  std::vector<ModeSummary> modes;
  double residual = 0.0; // largest relative residual
  int steps = 0;
  bool gammaReal = true; // gamma Hamiltonian kept two real frequencies on every step
  ModeFrame frame = ModeFrame::coupled;
};

/// Lab-frame spring matrix [[gammaS, -kI], [-kI, gammaF]] of the CBOD Hamiltonian.
Eigen::Matrix2d cbod_spring_matrix(const OscillatorParams& p, double t);

/// Evolves the ground state of H0(0) under the CBOD Hamiltonian for [0, Tf] and compares with the
/// ground state of H0(Tf). Every ramped spring must have duration Tf.
EvolutionResult evolve_cbod(const OscillatorParams& p, double Tf, const EvolutionOptions& opts = {});

double dynamic_fidelity(const OscillatorParams& p, double Tf, const EvolutionOptions& opts = {});

std::string to_string(ModeFrame f);

} // namespace cbod
