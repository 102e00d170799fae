#pragma once

// Physical parameters of the driven coupled-oscillator pair and the smooth ramp protocol.

#include <optional>
#include <string>
#include <variant>

namespace cbod {

struct UnitSystem {
  double hbar = 1.0;

  /// Throws DomainError unless hbar > 0.
  void check() const;
};

/// K(t) = k0 + (k1/Tf) [t - (Tf/2pi) sin(2 pi t / Tf)] on [0, Tf].
struct RampSchedule {
  double k0 = 0.0;
  double k1 = 0.0;
  double Tf = 1.0;
};

/// Value and first two time derivatives of a spring constant.
struct RampValue {
  double value = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

/// Analytic K, dK/dt, d2K/dt2. Throws DomainError for t outside [0, Tf] or Tf <= 0.
RampValue ramp_eval(const RampSchedule& s, double t);

/// A spring constant that is either fixed or follows a RampSchedule.
class SpringProfile {
public:
  SpringProfile() = default;
  SpringProfile(double constant) : profile_(constant) {} // NOLINT: implicit on purpose
  SpringProfile(RampSchedule ramp) : profile_(ramp) {}   // NOLINT

  RampValue at(double t) const;
  bool is_ramped() const noexcept { return std::holds_alternative<RampSchedule>(profile_); }
  const RampSchedule* ramp() const noexcept { return std::get_if<RampSchedule>(&profile_); }

private:
  std::variant<double, RampSchedule> profile_ = 0.0;
};

/// H0 = pS^2/2mS + pF^2/2mF + kappaS xS^2/2 + kappaF xF^2/2 - kI xS xF.
struct OscillatorParams {
  double mS = 1.0;
  double mF = 1.0;
  SpringProfile kappaS = 100.0;
  SpringProfile kappaF = 100.0;
  SpringProfile kI = 50.0;
  UnitSystem units{};
};

struct SpringValues {
  RampValue kappaS;
  RampValue kappaF;
  RampValue kI;
};

SpringValues springs_at(const OscillatorParams& p, double t);

struct Violation {
  double time = 0.0;
  std::string reason;
};

/// Checks masses, kappaS*kappaF > kI^2 and kappaS - kI^2/kappaF > 0 on `samples` uniform times in [0, Tf].
/// Returns the first violation, or nothing when the parameters are valid.
std::optional<Violation> validate(const OscillatorParams& p, double Tf, int samples);

} // namespace cbod
