#include "cbod/params.hpp"

#include "cbod/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cbod {

void UnitSystem::check() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw DomainError("hbar must be a positive finite number");
  }
}

RampValue ramp_eval(const RampSchedule& s, double t) {
  if (!(s.Tf > 0.0)) {
    throw DomainError("ramp duration Tf must be positive");
  }
  // Grids built as i*Tf/N can overshoot Tf by an ulp.
  const double slack = 1e-12 * s.Tf;
  if (t < -slack || t > s.Tf + slack || std::isnan(t)) {
    std::ostringstream msg;
    msg << "ramp evaluated at t=" << t << " outside [0, " << s.Tf << "]";
    throw DomainError(msg.str());
  }
  t = std::clamp(t, 0.0, s.Tf);

  const double w = 2.0 * std::numbers::pi / s.Tf;
  const double slope = s.k1 / s.Tf;
  RampValue out;
  out.value = s.k0 + slope * (t - std::sin(w * t) / w);
  out.rate = slope * (1.0 - std::cos(w * t));
  out.accel = slope * w * std::sin(w * t);
  // Exact endpoint values; sin(2 pi) is not zero in floating point.
  if (t == 0.0) {
    out = {s.k0, 0.0, 0.0};
  } else if (t == s.Tf) {
    out = {s.k0 + s.k1, 0.0, 0.0};
  }
  return out;
}

RampValue SpringProfile::at(double t) const {
  if (const auto* r = std::get_if<RampSchedule>(&profile_)) {
    return ramp_eval(*r, t);
  }
  return {std::get<double>(profile_), 0.0, 0.0};
}

SpringValues springs_at(const OscillatorParams& p, double t) {
  return {p.kappaS.at(t), p.kappaF.at(t), p.kI.at(t)};
}

std::optional<Violation> validate(const OscillatorParams& p, double Tf, int samples) {
  if (samples < 2) {
    throw DomainError("validate needs at least two samples");
  }
  if (!(p.mS > 0.0) || !(p.mF > 0.0)) {
    return Violation{0.0, "masses must be positive"};
  }
  if (!(p.units.hbar > 0.0)) {
    return Violation{0.0, "hbar must be positive"};
  }
  for (int i = 0; i < samples; ++i) {
    const double t = Tf * static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto k = springs_at(p, t);
    std::ostringstream msg;
    if (!(k.kappaF.value > 0.0)) {
      msg << "kappaF=" << k.kappaF.value << " is not positive";
      return Violation{t, msg.str()};
    }
    if (!(k.kappaS.value * k.kappaF.value > k.kI.value * k.kI.value)) {
      msg << "kappaS*kappaF=" << k.kappaS.value * k.kappaF.value << " <= kI^2=" << k.kI.value * k.kI.value;
      return Violation{t, msg.str()};
    }
    const double kappaSPrime = k.kappaS.value - k.kI.value * k.kI.value / k.kappaF.value;
    if (!(kappaSPrime > 0.0)) {
      msg << "effective slow spring " << kappaSPrime << " is not positive";
      return Violation{t, msg.str()};
    }
  }
  return std::nullopt;
}

} // namespace cbod
