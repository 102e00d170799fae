#include "cbod/oscillators.hpp"

#include "cbod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cbod {

namespace {

RampValue scaled(const RampValue& v, double factor) {
  return {v.value * factor, v.rate * factor, v.accel * factor};
}

void require_positive_mass(const OscillatorParams& p) {
  if (!(p.mS > 0.0) || !(p.mF > 0.0)) {
    throw DomainError("masses must be positive");
  }
  p.units.check();
}

} // namespace

Eigen::Matrix2d NormalModeFrame::lab_to_modes(double mS, double mF) const {
  const double q = std::pow(mS / mF, 0.25);
  Eigen::Matrix2d scale;
  scale << q, 0.0, 0.0, 1.0 / q;
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  return rot * scale;
}

std::array<RampValue, 3> mass_scaled_springs(double mS, double mF, const RampValue& kS, const RampValue& kF,
                                             const RampValue& kI) {
  const double r = std::sqrt(mF / mS);
  return {scaled(kS, r), scaled(kF, 1.0 / r), kI};
}

ModeSprings decompose_springs(const RampValue& a, const RampValue& b, const RampValue& c) {
  const double d = a.value - b.value;
  const double dd = a.rate - b.rate;
  const double ddd = a.accel - b.accel;

  const double R = std::hypot(d, 2.0 * c.value);
  double Rdot = 0.0;
  double Rddot = 0.0;
  if (R > 0.0) {
    Rdot = (d * dd + 4.0 * c.value * c.rate) / R;
    Rddot = (dd * dd + d * ddd + 4.0 * c.rate * c.rate + 4.0 * c.value * c.accel - Rdot * Rdot) / R;
  } else {
    // Exact crossing of decoupled modes: one-sided rate, curvature undefined.
    Rdot = std::hypot(dd, 2.0 * c.rate);
  }

  const bool decoupled = c.value == 0.0;
  const double sign = (decoupled && d < 0.0) ? -1.0 : 1.0;

  ModeSprings out;
  out.alpha = decoupled ? 0.0 : 0.5 * std::atan2(2.0 * c.value, d);

  const double mean = 0.5 * (a.value + b.value);
  double k1 = mean + 0.5 * sign * R;
  double k2 = mean - 0.5 * sign * R;
  // Recover the smaller-magnitude root from the determinant to avoid cancellation.
  const double det = a.value * b.value - c.value * c.value;
  if (std::abs(k1) >= std::abs(k2) && k1 != 0.0) {
    k2 = det / k1;
  } else if (k2 != 0.0) {
    k1 = det / k2;
  }
  out.kappa1 = {k1, 0.5 * (a.rate + b.rate) + 0.5 * sign * Rdot, 0.5 * (a.accel + b.accel) + 0.5 * sign * Rddot};
  out.kappa2 = {k2, 0.5 * (a.rate + b.rate) - 0.5 * sign * Rdot, 0.5 * (a.accel + b.accel) - 0.5 * sign * Rddot};
  return out;
}

ModeRates frequency_rates(const RampValue& kappa, double mass) {
  if (!(kappa.value > 0.0)) {
    std::ostringstream msg;
    msg << "spring constant " << kappa.value << " gives an imaginary frequency";
    throw ValidityError(msg.str());
  }
  ModeRates r;
  r.omega = std::sqrt(kappa.value / mass);
  const double rel = kappa.rate / kappa.value;
  r.omegaDot = 0.5 * r.omega * rel;
  r.omegaDDot = r.omega * (0.5 * kappa.accel / kappa.value - 0.25 * rel * rel);
  return r;
}

NormalModeFrame normal_mode_frame(const OscillatorParams& p, double t) {
  require_positive_mass(p);
  const auto k = springs_at(p, t);
  const auto [a, b, c] = mass_scaled_springs(p.mS, p.mF, k.kappaS, k.kappaF, k.kI);
  const auto modes = decompose_springs(a, b, c);

  NormalModeFrame f;
  f.alpha = modes.alpha;
  f.mu = std::sqrt(p.mS * p.mF);
  f.kappa1 = modes.kappa1.value;
  f.kappa2 = modes.kappa2.value;
  if (!(f.kappa1 > 0.0) || !(f.kappa2 > 0.0)) {
    std::ostringstream msg;
    msg << "normal-mode springs (" << f.kappa1 << ", " << f.kappa2 << ") at t=" << t << " are not both positive";
    throw ValidityError(msg.str());
  }
  f.omega1 = std::sqrt(f.kappa1 / f.mu);
  f.omega2 = std::sqrt(f.kappa2 / f.mu);
  return f;
}

std::array<ModeRates, 2> normal_mode_rates(const OscillatorParams& p, double t) {
  require_positive_mass(p);
  const auto k = springs_at(p, t);
  const auto [a, b, c] = mass_scaled_springs(p.mS, p.mF, k.kappaS, k.kappaF, k.kI);
  const auto modes = decompose_springs(a, b, c);
  const double mu = std::sqrt(p.mS * p.mF);
  return {frequency_rates(modes.kappa1, mu), frequency_rates(modes.kappa2, mu)};
}

std::vector<double> unwrap_mode_angles(const OscillatorParams& p, std::span<const double> times) {
  std::vector<double> out;
  out.reserve(times.size());
  double shift = 0.0;
  for (const double t : times) {
    double alpha = normal_mode_frame(p, t).alpha + shift;
    if (!out.empty()) {
      // A rotation by pi only flips the sign of both mode coordinates.
      while (alpha - out.back() > 0.5 * std::numbers::pi) {
        alpha -= std::numbers::pi;
        shift -= std::numbers::pi;
      }
      while (alpha - out.back() < -0.5 * std::numbers::pi) {
        alpha += std::numbers::pi;
        shift += std::numbers::pi;
      }
    }
    out.push_back(alpha);
  }
  return out;
}

GroundState exact_ground_state(const OscillatorParams& p, double t) {
  const auto frame = normal_mode_frame(p, t);
  const double hbar = p.units.hbar;
  const auto modeState = product_state(GaussianState1D::normalized(frame.mu * frame.omega1 / hbar),
                                       GaussianState1D::normalized(frame.mu * frame.omega2 / hbar));
  return {pull_back(modeState, frame.lab_to_modes(p.mS, p.mF)), exact_energy(p, t, 0, 0)};
}

double exact_energy(const OscillatorParams& p, double t, int i, int j) {
  if (i < 0 || j < 0) {
    throw DomainError("quantum numbers must be non-negative");
  }
  const auto f = normal_mode_frame(p, t);
  return p.units.hbar * (f.omega1 * (i + 0.5) + f.omega2 * (j + 0.5));
}

BOAFrame boa_frame(const OscillatorParams& p, double t) {
  require_positive_mass(p);
  const auto k = springs_at(p, t);
  if (!(k.kappaF.value > 0.0)) {
    throw ValidityError("fast spring constant must be positive");
  }
  BOAFrame f;
  f.slope = k.kI.value / k.kappaF.value;
  f.kappaSPrime = k.kappaS.value - k.kI.value * k.kI.value / k.kappaF.value;
  if (!(f.kappaSPrime > 0.0)) {
    std::ostringstream msg;
    msg << "effective slow spring " << f.kappaSPrime << " at t=" << t << " gives an imaginary slow frequency";
    throw ValidityError(msg.str());
  }
  f.omegaS = std::sqrt(f.kappaSPrime / p.mS);
  f.omegaF = std::sqrt(k.kappaF.value / p.mF);
  return f;
}

BOARates boa_rates(const OscillatorParams& p, double t) {
  require_positive_mass(p);
  const auto k = springs_at(p, t);
  const auto& [kS, kSd, kSdd] = k.kappaS;
  const auto& [kF, kFd, kFdd] = k.kappaF;
  const auto& [kI, kId, kIdd] = k.kI;
  if (!(kF > 0.0)) {
    throw ValidityError("fast spring constant must be positive");
  }

  // kappaS' = kS - kI^2 / kF, differentiated twice.
  RampValue prime;
  prime.value = kS - kI * kI / kF;
  prime.rate = kSd - 2.0 * kI * kId / kF + kI * kI * kFd / (kF * kF);
  prime.accel = kSdd - 2.0 * (kId * kId + kI * kIdd) / kF + 4.0 * kI * kId * kFd / (kF * kF) +
                kI * kI * kFdd / (kF * kF) - 2.0 * kI * kI * kFd * kFd / (kF * kF * kF);

  return {frequency_rates(prime, p.mS), frequency_rates(k.kappaF, p.mF), prime};
}

GroundState boa_ground_state(const OscillatorParams& p, double t) {
  const auto f = boa_frame(p, t);
  const double hbar = p.units.hbar;
  // z = (xS, xT) with xT = xF - slope xS.
  const auto zState = product_state(GaussianState1D::normalized(p.mS * f.omegaS / hbar),
                                    GaussianState1D::normalized(p.mF * f.omegaF / hbar));
  Eigen::Matrix2d M;
  M << 1.0, 0.0, -f.slope, 1.0;
  return {pull_back(zState, M), 0.5 * hbar * (f.omegaS + f.omegaF)};
}

double static_fidelity(const OscillatorParams& p, double t) {
  const auto exact = exact_ground_state(p, t);
  const auto boa = boa_ground_state(p, t);
  return std::clamp(fidelity(exact.state, boa.state), 0.0, 1.0);
}

GeometricQuantities geometric_quantities(const OscillatorParams& p, double t) {
  const auto k = springs_at(p, t);
  const auto f = boa_frame(p, t);
  GeometricQuantities g;
  g.berryConnection = 0.0;
  g.geometricTensor =
      k.kI.value * k.kI.value * f.omegaF * p.mF / (2.0 * p.units.hbar * k.kappaF.value * k.kappaF.value);
  return g;
}

} // namespace cbod
