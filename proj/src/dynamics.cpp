#include "cbod/dynamics.hpp"

#include "cbod/cd_engine.hpp"
#include "cbod/errors.hpp"
#include "cbod/oscillators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cbod {

namespace {

struct ErmakovPoint {
  double b;
  double v;
  double phi;
};

ErmakovPoint axpy(const ErmakovPoint& s, double h, const ErmakovPoint& k) {
  return {s.b + h * k.b, s.v + h * k.v, s.phi + h * k.phi};
}

Eigen::Matrix2d rotation(double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

ModeSprings decompose(const Eigen::Matrix2d& Kz) {
  return decompose_springs({Kz(0, 0), 0.0, 0.0}, {Kz(1, 1), 0.0, 0.0}, {-Kz(0, 1), 0.0, 0.0});
}

void check_durations(const OscillatorParams& p, double Tf) {
  if (!(Tf > 0.0) || !std::isfinite(Tf)) {
    throw DomainError("evolution time Tf must be positive");
  }
  for (const SpringProfile* s : {&p.kappaS, &p.kappaF, &p.kI}) {
    if (const auto* r = s->ramp(); r && std::abs(r->Tf - Tf) > 1e-12 * Tf) {
      std::ostringstream msg;
      msg << "ramp duration " << r->Tf << " differs from evolution time " << Tf;
      throw DomainError(msg.str());
    }
  }
}

// Shared by both propagation schemes.
struct Setup {
  double mu;
  double hbar;
  Eigen::Matrix2d D;    // z = D x
  Eigen::Matrix2d Dinv;
};

Setup make_setup(const OscillatorParams& p) {
  Setup s;
  s.mu = std::sqrt(p.mS * p.mF);
  s.hbar = p.units.hbar;
  const double q = std::pow(p.mS / p.mF, 0.25);
  s.D = Eigen::Vector2d(q, 1.0 / q).asDiagonal();
  s.Dinv = Eigen::Vector2d(1.0 / q, q).asDiagonal();
  return s;
}

bool gamma_real(const Eigen::Matrix2d& K) {
  return K(1, 1) > 0.0 && K.determinant() > 0.0;
}

EvolutionResult run_coupled(const OscillatorParams& p, double Tf, int steps, const GaussianState2D& initial) {
  const Setup s = make_setup(p);
  const double h = Tf / steps;
  const auto Kz = [&](double t) -> Eigen::Matrix2d { return s.Dinv * cbod_spring_matrix(p, t) * s.Dinv; };

  using M2 = Eigen::Matrix2cd;
  const M2 Az0 = (s.Dinv.cast<cplx>() * initial.quad * s.Dinv.cast<cplx>()).eval();
  M2 Q = M2::Identity();
  M2 P = cplx(0.0, s.hbar / s.mu) * Az0;

  EvolutionResult out;
  out.frame = ModeFrame::coupled;
  out.steps = steps;

  Eigen::Matrix2d K0 = Kz(0.0);
  const auto modes0 = decompose(K0);
  const double omegaRefSq = std::max(std::abs(modes0.kappa1.value), std::abs(modes0.kappa2.value)) / s.mu;

  double argDet = 0.0;
  cplx detPrev(1.0, 0.0);
  Eigen::Matrix2d Kcur = K0;
  M2 Pprev = P;
  double residual = 0.0;
  out.gammaReal = gamma_real(cbod_spring_matrix(p, 0.0));

  for (int i = 0; i < steps; ++i) {
    const double t = Tf * i / steps;
    const double tNext = Tf * (i + 1) / steps;
    const Eigen::Matrix2d Kmid = Kz(t + 0.5 * h);
    const Eigen::Matrix2d Knext = Kz(tNext);
    const auto accel = [&](const Eigen::Matrix2d& K, const M2& X) -> M2 { return -(K.cast<cplx>() * X) / s.mu; };

    const M2 q1 = P;
    const M2 p1 = accel(Kcur, Q);
    const M2 q2 = P + 0.5 * h * p1;
    const M2 p2 = accel(Kmid, Q + 0.5 * h * q1);
    const M2 q3 = P + 0.5 * h * p2;
    const M2 p3 = accel(Kmid, Q + 0.5 * h * q2);
    const M2 q4 = P + h * p3;
    const M2 p4 = accel(Knext, Q + h * q3);
    const M2 Qn = Q + (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
    const M2 Pn = P + (h / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4);

    if (i > 0) {
      const M2 r = (Pn - Pprev) / (2.0 * h) + (Kcur.cast<cplx>() * Q) / s.mu;
      residual = std::max(residual, r.norm() / (omegaRefSq * Q.norm()));
    }

    const cplx det = Qn.determinant();
    if (!std::isfinite(det.real()) || det == cplx(0.0)) {
      throw SingularityError(tNext);
    }
    argDet += std::arg(det / detPrev);
    detPrev = det;

    Pprev = P;
    Q = Qn;
    P = Pn;
    Kcur = Knext;
    out.gammaReal = out.gammaReal && gamma_real(s.D * Knext * s.D);
  }

  M2 Az = cplx(0.0, -s.mu / s.hbar) * P * Q.inverse();
  Az = 0.5 * (Az + Az.transpose()).eval();
  GaussianState2D zState;
  zState.quad = Az;
  zState.logNorm = initial.logNorm - 0.5 * std::log(std::abs(detPrev));
  zState.phase = initial.phase - 0.5 * argDet;
  out.finalState = pull_back(zState, s.D);
  if (!out.finalState.normalizable()) {
    throw NumericalError("coupled propagation lost normalizability");
  }
  out.residual = residual;

  const auto modesT = decompose(Kcur);
  const Eigen::Matrix2cd proj =
      rotation(modesT.alpha).cast<cplx>() * Q * rotation(modes0.alpha).transpose().cast<cplx>();
  for (int m = 0; m < 2; ++m) {
    const double kappa = m == 0 ? modes0.kappa1.value : modes0.kappa2.value;
    out.modes.push_back({std::sqrt(kappa / s.mu), std::abs(proj(m, m)), residual});
  }
  return out;
}

EvolutionResult run_instantaneous(const OscillatorParams& p, double Tf, int steps) {
  const Setup s = make_setup(p);
  const auto modeSq = [&](int m) {
    return [&p, &s, m](double t) {
      const auto modes = decompose(s.Dinv * cbod_spring_matrix(p, t) * s.Dinv);
      return (m == 0 ? modes.kappa1.value : modes.kappa2.value) / s.mu;
    };
  };

  EvolutionResult out;
  out.frame = ModeFrame::instantaneous;
  out.steps = steps;

  std::array<GaussianState1D, 2> finals;
  for (int m = 0; m < 2; ++m) {
    const FrequencySquared w2 = modeSq(m);
    const double omega0 = std::sqrt(w2(0.0));
    const auto sol = solve_ermakov(w2, omega0, Tf, steps);
    const auto init = GaussianState1D::normalized(s.mu * omega0 / s.hbar);
    finals[m] = scaled_state(init, sol, s.mu, Tf, s.hbar);
    const double rel = sol.residual / (omega0 * omega0);
    out.modes.push_back({omega0, sol.b.back(), rel});
    out.residual = std::max(out.residual, rel);
  }

  for (int i = 0; i <= steps; ++i) {
    out.gammaReal = out.gammaReal && gamma_real(cbod_spring_matrix(p, Tf * i / steps));
  }

  const auto modesT = decompose(s.Dinv * cbod_spring_matrix(p, Tf) * s.Dinv);
  out.finalState = pull_back(product_state(finals[0], finals[1]), rotation(modesT.alpha) * s.D);
  return out;
}

} // namespace

ErmakovSolution solve_ermakov(const FrequencySquared& omegaSq, double omega0, double Tf, int steps) {
  if (steps < 100) {
    throw DomainError("solve_ermakov needs at least 100 steps");
  }
  if (!(Tf > 0.0) || !std::isfinite(Tf)) {
    throw DomainError("Ermakov duration must be positive");
  }
  if (!(omega0 > 0.0)) {
    throw DomainError("omega0 must be positive");
  }

  const double h = Tf / steps;
  const double w0sq = omega0 * omega0;
  const auto rhs = [&](double t, double w2, const ErmakovPoint& y) -> ErmakovPoint {
    if (!(y.b > 0.0)) {
      throw SingularityError(t);
    }
    const double inv2 = 1.0 / (y.b * y.b);
    return {y.v, -w2 * y.b + w0sq * inv2 / y.b, inv2};
  };

  ErmakovSolution sol;
  sol.omega0 = omega0;
  sol.times.resize(steps + 1);
  sol.b.resize(steps + 1);
  sol.bdot.resize(steps + 1);
  sol.phaseIntegral.resize(steps + 1);
  std::vector<double> w2nodes(steps + 1);

  ErmakovPoint y{1.0, 0.0, 0.0};
  double w2cur = omegaSq(0.0);
  sol.times[0] = 0.0;
  sol.b[0] = 1.0;
  sol.bdot[0] = 0.0;
  sol.phaseIntegral[0] = 0.0;
  w2nodes[0] = w2cur;

  for (int i = 0; i < steps; ++i) {
    const double t = Tf * i / steps;
    const double tNext = i + 1 == steps ? Tf : Tf * (i + 1) / steps;
    const double w2mid = omegaSq(t + 0.5 * h);
    const double w2next = omegaSq(tNext);

    const auto k1 = rhs(t, w2cur, y);
    const auto k2 = rhs(t + 0.5 * h, w2mid, axpy(y, 0.5 * h, k1));
    const auto k3 = rhs(t + 0.5 * h, w2mid, axpy(y, 0.5 * h, k2));
    const auto k4 = rhs(tNext, w2next, axpy(y, h, k3));
    y.b += h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    y.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    y.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    if (!(y.b > 0.0) || !std::isfinite(y.b)) {
      throw SingularityError(tNext);
    }

    sol.times[i + 1] = tNext;
    sol.b[i + 1] = y.b;
    sol.bdot[i + 1] = y.v;
    sol.phaseIntegral[i + 1] = y.phi;
    w2nodes[i + 1] = w2next;
    w2cur = w2next;
  }

  for (int i = 1; i < steps; ++i) {
    const double bddot = (sol.bdot[i + 1] - sol.bdot[i - 1]) / (2.0 * h);
    const double b = sol.b[i];
    const double r = bddot + w2nodes[i] * b - w0sq / (b * b * b);
    sol.residual = std::max(sol.residual, std::abs(r));
  }
  return sol;
}

GaussianState1D scaled_state(const GaussianState1D& initial, const ErmakovSolution& sol, double mass, double t,
                             double hbar) {
  if (sol.times.empty()) {
    throw DomainError("empty Ermakov solution");
  }
  const double tol = 1e-12 * std::max(1.0, sol.times.back());
  const auto it = std::lower_bound(sol.times.begin(), sol.times.end(), t - tol);
  if (it == sol.times.end() || std::abs(*it - t) > tol) {
    std::ostringstream msg;
    msg << "t=" << t << " is not a node of the Ermakov time grid";
    throw DomainError(msg.str());
  }
  const auto i = static_cast<std::size_t>(it - sol.times.begin());
  const double b = sol.b[i];
  const double bdot = sol.bdot[i];
  const double w0 = sol.omega0;

  // Free evolution in the scaled frame for tau = int dt/b^2, via q(tau) = cos + i c sin, A = -i m q'/(hbar q).
  // q picks up a factor -1 every half period, so its argument unwraps as n pi + arg q(r).
  const double theta = w0 * sol.phaseIntegral[i];
  const double n = std::floor(theta / std::numbers::pi + 0.5);
  const double r = theta - n * std::numbers::pi;
  const cplx c = hbar * initial.quad / (mass * w0);
  const cplx q = std::cos(r) + cplx(0.0, 1.0) * c * std::sin(r);
  const cplx qdot = w0 * (-std::sin(r) + cplx(0.0, 1.0) * c * std::cos(r));
  const cplx A = cplx(0.0, -mass / hbar) * qdot / q;

  GaussianState1D out;
  out.quad = A / (b * b) - cplx(0.0, mass * bdot / (hbar * b));
  out.logNorm = initial.logNorm - 0.5 * std::log(std::abs(q)) - 0.5 * std::log(b);
  out.phase = initial.phase - 0.5 * (n * std::numbers::pi + std::arg(q));
  return out;
}

Eigen::Matrix2d cbod_spring_matrix(const OscillatorParams& p, double t) {
  const auto g = cbod_effective_springs(p, t);
  const double kI = springs_at(p, t).kI.value;
  Eigen::Matrix2d K;
  K << g.gammaS, -kI, -kI, g.gammaF;
  return K;
}

EvolutionResult evolve_cbod(const OscillatorParams& p, double Tf, const EvolutionOptions& opts) {
  check_durations(p, Tf);
  if (auto v = validate(p, Tf, 257)) {
    std::ostringstream msg;
    msg << "invalid parameters at t=" << v->time << ": " << v->reason;
    throw ValidityError(msg.str());
  }
  if (opts.frame == ModeFrame::instantaneous && opts.initial == InitialState::boa) {
    throw DomainError("instantaneous mode-frame evolution starts from the exact ground state only");
  }

  int steps = opts.steps > 0
                  ? opts.steps
                  : std::max(opts.minSteps, static_cast<int>(std::ceil(opts.stepsPerUnitTime * Tf - 1e-9)));
  steps = std::max(steps, 100);

  const GaussianState2D initial =
      opts.initial == InitialState::exact ? exact_ground_state(p, 0.0).state : boa_ground_state(p, 0.0).state;

  EvolutionResult out;
  for (int doubling = 0;; ++doubling) {
    out = opts.frame == ModeFrame::coupled ? run_coupled(p, Tf, steps, initial) : run_instantaneous(p, Tf, steps);
    if (!opts.refine || out.residual <= opts.residualTol || doubling >= opts.maxDoublings) {
      break;
    }
    steps *= 2;
  }

  const auto target = exact_ground_state(p, Tf);
  out.fidelity = std::clamp(fidelity(target.state, out.finalState), 0.0, 1.0);
  return out;
}

double dynamic_fidelity(const OscillatorParams& p, double Tf, const EvolutionOptions& opts) {
  return evolve_cbod(p, Tf, opts).fidelity;
}

std::string to_string(ModeFrame f) {
  return f == ModeFrame::coupled ? "coupled" : "instantaneous";
}

} // namespace cbod
