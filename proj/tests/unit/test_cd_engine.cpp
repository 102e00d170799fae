#include "cbod/cd_engine.hpp"
#include "cbod/errors.hpp"
#include "cbod/oscillators.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace cbod;
using cplx = std::complex<double>;

namespace {

OscillatorParams ramped_pair(double ratio) {
  OscillatorParams p;
  p.mS = 1.0 / ratio;
  p.mF = 1.0;
  p.kappaS = RampSchedule{50.0, 25.0, 1.0};
  p.kappaF = RampSchedule{100.0, -20.0, 1.0};
  p.kI = RampSchedule{40.0, 10.0, 1.0};
  return p;
}

// omega(t) and two derivatives by central differences of an omega built straight from the springs.
struct FD {
  double w, wd, wdd;
};
template <class Omega>
FD differentiate(Omega omega, double t, double h) {
  const double a = omega(t - h), b = omega(t), c = omega(t + h);
  return {b, (c - a) / (2 * h), (c - 2 * b + a) / (h * h)};
}

Eigen::MatrixXcd random_hermitian(int n) {
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      A(i, j) = cplx(gen::uniform(-1, 1), gen::uniform(-1, 1));
    }
  }
  return 0.5 * (A + A.adjoint());
}

} // namespace

TEST_CASE("exact CD coefficients follow the mode frequencies") {
  const auto p = ramped_pair(0.05);
  const double t = 0.37;
  const auto cd = exact_cd(p, t);
  const auto rates = normal_mode_rates(p, t);
  CHECK(cd[0].coordinate == Coordinate::mode1);
  CHECK(cd[1].coordinate == Coordinate::mode2);
  for (int m = 0; m < 2; ++m) {
    const auto omega = [&](double s) {
      const auto f = normal_mode_frame(p, s);
      return m == 0 ? f.omega1 : f.omega2;
    };
    const auto d = differentiate(omega, t, 1e-4);
    CHECK(cd[m].coeff == doctest::Approx(-d.wd / (4 * d.w)).epsilon(1e-6));
    CHECK(rates[m].omegaDDot == doctest::Approx(d.wdd).epsilon(1e-4));
    const double wT = d.w * d.w - 0.75 * std::pow(d.wd / d.w, 2) + 0.5 * d.wdd / d.w;
    CHECK(transformed_frequencies(p, t)[m] == doctest::Approx(wT).epsilon(1e-6));
  }
}

TEST_CASE("CD terms vanish at the ramp endpoints") {
  const auto p = ramped_pair(0.1);
  for (const double t : {0.0, 1.0}) {
    for (const auto& c : exact_cd(p, t)) {
      CHECK(std::abs(c.coeff) < 1e-12);
    }
    for (const auto& c : cbod_cd(p, t)) {
      CHECK(std::abs(c.coeff) < 1e-12);
    }
  }
}

TEST_CASE("CBOD springs against finite-difference BOA frequencies") {
  for (int trial = 0; trial < 20; ++trial) {
    const double ratio = gen::log_uniform(1e-3, 1.0);
    const auto p = ramped_pair(ratio);
    const double t = gen::uniform(0.1, 0.9);
    const auto omegaS = [&](double s) {
      const auto k = springs_at(p, s);
      return std::sqrt((k.kappaS.value - k.kI.value * k.kI.value / k.kappaF.value) / p.mS);
    };
    const auto omegaF = [&](double s) { return std::sqrt(springs_at(p, s).kappaF.value / p.mF); };
    const auto S = differentiate(omegaS, t, 1e-4);
    const auto F = differentiate(omegaF, t, 1e-4);
    const auto k = springs_at(p, t);
    const double kI = k.kI.value, kF = k.kappaF.value;

    const double gammaS = k.kappaS.value - 0.75 * p.mS * std::pow(S.wd / S.w, 2) -
                          p.mF * F.wd * F.wd * kI * kI / (4 * F.w * F.w * kF * kF) + 0.5 * p.mS * S.wdd / S.w;
    const double gammaF = kF - 0.75 * p.mF * std::pow(F.wd / F.w, 2) + 0.5 * p.mF * F.wdd / F.w;
    const auto g = cbod_effective_springs(p, t);
    CHECK(g.gammaS == doctest::Approx(gammaS).epsilon(1e-5).scale(p.mS));
    CHECK(g.gammaF == doctest::Approx(gammaF).epsilon(1e-5).scale(p.mF));

    const auto cd = cbod_cd(p, t);
    CHECK(cd[0].coordinate == Coordinate::slow);
    CHECK(cd[1].coordinate == Coordinate::fastShifted);
    CHECK(cd[0].coeff == doctest::Approx(-S.wd / (4 * S.w)).epsilon(1e-6));
    CHECK(cd[1].coeff == doctest::Approx(-F.wd / (4 * F.w)).epsilon(1e-6));

    Eigen::Matrix2d G;
    G << g.gammaS, -kI, -kI, g.gammaF;
    const bool posdef = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(G).eigenvalues().minCoeff() > 0.0;
    CHECK(g.realFrequency == posdef);
  }
}

TEST_CASE("static CBOD springs reduce to the bare springs") {
  OscillatorParams p;
  const auto g = cbod_effective_springs(p, 0.3);
  CHECK(g.gammaS == doctest::Approx(100.0));
  CHECK(g.gammaF == doctest::Approx(100.0));
  CHECK(g.realFrequency);
}

TEST_CASE("spectral CD reproduces i hbar <m|d_t n> of a driven matrix") {
  for (int trial = 0; trial < 10; ++trial) {
    const int n = gen::integer(2, 7);
    const double hbar = gen::uniform(0.5, 2.0);
    const Eigen::MatrixXcd H0 = random_hermitian(n);
    const Eigen::MatrixXcd dH = random_hermitian(n);
    const Eigen::MatrixXcd H1 = spectral_cd_matrix(H0, dH, hbar);

    // Eigenvectors at t = +-h, phase-aligned with those at t = 0.
    const double h = 1e-6;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e0(H0), ep(H0 + h * dH), em(H0 - h * dH);
    const auto aligned = [&](const Eigen::MatrixXcd& V) {
      Eigen::MatrixXcd out = V;
      for (int k = 0; k < n; ++k) {
        const cplx o = e0.eigenvectors().col(k).dot(V.col(k));
        out.col(k) *= std::conj(o) / std::abs(o);
      }
      return out;
    };
    const Eigen::MatrixXcd dV = (aligned(ep.eigenvectors()) - aligned(em.eigenvectors())) / (2 * h);
    const Eigen::MatrixXcd V = e0.eigenvectors();
    const Eigen::MatrixXcd expected = cplx(0, hbar) * V.adjoint() * dV;
    const Eigen::MatrixXcd got = V.adjoint() * H1 * V;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a != b) {
          CHECK(std::abs(got(a, b) - expected(a, b)) < 1e-6 * (1 + std::abs(expected(a, b))));
        } else {
          CHECK(std::abs(got(a, a)) < 1e-12);
        }
      }
    }
    CHECK((H1 - H1.adjoint()).norm() < 1e-12 * H1.norm());
  }
}

TEST_CASE("spectral CD keeps a driven state in its instantaneous eigenstate") {
  const int n = 4;
  const Eigen::MatrixXcd A = 0.2 * random_hermitian(n);
  const Eigen::MatrixXcd B = 0.2 * random_hermitian(n);
  Eigen::VectorXd diag(n);
  diag << -3, -1, 1, 3;
  const Eigen::MatrixXcd D = diag.cast<cplx>().asDiagonal();
  // Small perturbations of well-separated levels: gapped on [0, 1].
  const auto H = [&](double t) -> Eigen::MatrixXcd { return D + std::sin(t) * A + 0.5 * t * t * B; };
  const auto Hdot = [&](double t) -> Eigen::MatrixXcd { return std::cos(t) * A + t * B; };
  const auto total = [&](double t) -> Eigen::MatrixXcd { return H(t) + spectral_cd_matrix(H(t), Hdot(t)); };

  Eigen::VectorXcd psi = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H(0.0)).eigenvectors().col(1);
  const int steps = 2000;
  const double dt = 1.0 / steps;
  const auto f = [&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return cplx(0, -1) * total(t) * y; };
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    const Eigen::VectorXcd k1 = f(t, psi);
    const Eigen::VectorXcd k2 = f(t + dt / 2, psi + dt / 2 * k1);
    const Eigen::VectorXcd k3 = f(t + dt / 2, psi + dt / 2 * k2);
    const Eigen::VectorXcd k4 = f(t + dt, psi + dt * k3);
    psi += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const Eigen::VectorXcd target = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H(1.0)).eigenvectors().col(1);
  CHECK(std::norm(target.dot(psi)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral CD scales with hbar and rejects bad input") {
  const Eigen::MatrixXcd H0 = random_hermitian(3);
  const Eigen::MatrixXcd dH = random_hermitian(3);
  CHECK((spectral_cd_matrix(H0, dH, 2.0) - 2.0 * spectral_cd_matrix(H0, dH, 1.0)).norm() < 1e-12);
  CHECK_THROWS_AS(spectral_cd_matrix(H0, Eigen::MatrixXcd::Zero(2, 2)), DomainError);

  Eigen::MatrixXcd degenerate = Eigen::MatrixXcd::Zero(3, 3);
  degenerate.diagonal() << 1.0, 2.0, 2.0;
  try {
    spectral_cd_matrix(degenerate, dH);
    FAIL("expected a degeneracy error");
  } catch (const DegeneracyError& e) {
    CHECK(e.first() == 1);
    CHECK(e.second() == 2);
    CHECK(e.gap() == 0.0);
  }
}
