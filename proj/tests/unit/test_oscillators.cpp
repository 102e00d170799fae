#include "cbod/errors.hpp"
#include "cbod/oscillators.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace cbod;

TEST_CASE("normal-mode frequencies match the generalized eigenproblem") {
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = gen::static_pair();
    const auto f = normal_mode_frame(p, 0.0);
    const Eigen::Vector2d w2 = oracle::squared_frequencies(oracle::spring_matrix(p, 0.0), oracle::mass_matrix(p));
    CHECK(f.omega1 >= f.omega2);
    CHECK(f.omega1 * f.omega1 == doctest::Approx(w2(1)).epsilon(1e-12));
    CHECK(f.omega2 * f.omega2 == doctest::Approx(w2(0)).epsilon(1e-10));
    CHECK(f.mu == doctest::Approx(std::sqrt(p.mS * p.mF)));
  }
}

TEST_CASE("lab_to_modes diagonalizes both quadratic forms") {
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = gen::static_pair();
    const auto f = normal_mode_frame(p, 0.0);
    const Eigen::Matrix2d L = f.lab_to_modes(p.mS, p.mF);
    const Eigen::Matrix2d K = oracle::spring_matrix(p, 0.0);
    const Eigen::Matrix2d Kmodes = L.transpose().inverse() * K * L.inverse();
    CHECK(Kmodes(0, 0) == doctest::Approx(f.kappa1).epsilon(1e-10));
    CHECK(Kmodes(1, 1) == doctest::Approx(f.kappa2).epsilon(1e-10));
    CHECK(std::abs(Kmodes(0, 1)) < 1e-10 * K.norm());
    // Kinetic form: L M^-1 L^T = I / mu.
    const Eigen::Matrix2d T = L * oracle::mass_matrix(p).inverse() * L.transpose() * f.mu;
    CHECK((T - Eigen::Matrix2d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("decoupled springs keep coordinate labels") {
  const auto m = decompose_springs({3.0, 1.0, 0.0}, {5.0, -1.0, 0.0}, {0.0, 0.0, 0.0});
  CHECK(m.alpha == 0.0);
  CHECK(m.kappa1.value == doctest::Approx(3.0));
  CHECK(m.kappa2.value == doctest::Approx(5.0));
  CHECK(m.kappa1.rate == doctest::Approx(1.0));
  CHECK(m.kappa2.rate == doctest::Approx(-1.0));
}

TEST_CASE("mode spring and frequency rates match finite differences") {
  for (int trial = 0; trial < 30; ++trial) {
    auto p = gen::static_pair(0.7);
    const double Tf = gen::uniform(0.5, 2.0);
    p.kappaS = RampSchedule{gen::uniform(60.0, 120.0), gen::uniform(-20.0, 20.0), Tf};
    p.kappaF = RampSchedule{gen::uniform(60.0, 120.0), gen::uniform(-20.0, 20.0), Tf};
    p.kI = RampSchedule{gen::uniform(-30.0, 30.0), gen::uniform(-10.0, 10.0), Tf};
    const double t = gen::uniform(0.2, 0.8) * Tf;
    const double h = 1e-5 * Tf;
    const auto rates = normal_mode_rates(p, t);
    const auto up = normal_mode_rates(p, t + h);
    const auto down = normal_mode_rates(p, t - h);
    for (int m = 0; m < 2; ++m) {
      const double fdRate = (up[m].omega - down[m].omega) / (2 * h);
      const double fdAccel = (up[m].omegaDot - down[m].omegaDot) / (2 * h);
      CHECK(rates[m].omegaDot == doctest::Approx(fdRate).epsilon(1e-6).scale(1.0));
      CHECK(rates[m].omegaDDot == doctest::Approx(fdAccel).epsilon(1e-5).scale(10.0));
    }
  }
}

TEST_CASE("frequency_rates rejects non-positive springs") {
  CHECK_THROWS_AS(frequency_rates({-1.0, 0.0, 0.0}, 1.0), ValidityError);
  const auto r = frequency_rates({4.0, 2.0, 0.0}, 1.0);
  CHECK(r.omega == doctest::Approx(2.0));
  CHECK(r.omegaDot == doctest::Approx(0.5)); // kdot / (2 sqrt(k m))
}

TEST_CASE("mode angle unwrapping is continuous") {
  OscillatorParams p;
  p.mS = 1.0;
  p.mF = 1.0;
  p.kappaS = RampSchedule{50.0, 100.0, 1.0}; // a - b changes sign
  p.kappaF = 100.0;
  p.kI = 10.0;
  std::vector<double> times;
  for (int i = 0; i <= 400; ++i) {
    times.push_back(i / 400.0);
  }
  const auto a = unwrap_mode_angles(p, times);
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - a[i - 1]) < 0.2);
  }
  CHECK(std::abs(std::remainder(a.back() - normal_mode_frame(p, 1.0).alpha, std::numbers::pi)) < 1e-12);
}

TEST_CASE("exact ground state matches the matrix square-root oracle") {
  for (int trial = 0; trial < 40; ++trial) {
    auto p = gen::static_pair();
    p.units.hbar = gen::log_uniform(0.3, 3.0);
    const auto gs = exact_ground_state(p, 0.0);
    const Eigen::Matrix2d K = oracle::spring_matrix(p, 0.0);
    const Eigen::Matrix2d M = oracle::mass_matrix(p);
    const Eigen::Matrix2d A = oracle::ground_quad(K, M, p.units.hbar);
    CHECK((gs.state.quad.real() - A).norm() < 1e-10 * A.norm());
    CHECK(gs.state.quad.imag().norm() == 0.0);
    CHECK(gs.state.norm() == doctest::Approx(1.0).epsilon(1e-12));

    // <T> + <V> of the Gaussian, independent of the mode decomposition.
    const double hb = p.units.hbar;
    const double T = 0.25 * hb * hb * (M.inverse() * A).trace();
    const double V = 0.25 * (K * A.inverse()).trace();
    CHECK(gs.energy == doctest::Approx(T + V).epsilon(1e-10));
    CHECK(exact_energy(p, 0.0, 0, 0) == doctest::Approx(gs.energy).epsilon(1e-12));
  }
}

TEST_CASE("exact_energy ladder") {
  const auto p = gen::static_pair();
  const auto f = normal_mode_frame(p, 0.0);
  CHECK(exact_energy(p, 0.0, 2, 1) - exact_energy(p, 0.0, 0, 0) ==
        doctest::Approx(2 * f.omega1 + f.omega2).epsilon(1e-12));
  CHECK_THROWS_AS(exact_energy(p, 0.0, -1, 0), DomainError);
}

TEST_CASE("BOA frame and ground state") {
  OscillatorParams p;
  p.mS = 20.0;
  p.mF = 1.0;
  p.kappaS = 100.0;
  p.kappaF = 100.0;
  p.kI = 50.0;
  const auto b = boa_frame(p, 0.0);
  CHECK(b.slope == doctest::Approx(0.5));
  CHECK(b.kappaSPrime == doctest::Approx(75.0));
  CHECK(b.omegaS == doctest::Approx(std::sqrt(75.0 / 20.0)));
  CHECK(b.omegaF == doctest::Approx(10.0));
  const auto g = boa_ground_state(p, 0.0);
  CHECK(g.energy == doctest::Approx(0.5 * (b.omegaS + b.omegaF)));
  CHECK(g.state.norm() == doctest::Approx(1.0));
  // phi0(xF - s xS) psi0(xS) evaluated directly.
  const double xS = 0.13, xF = -0.07;
  const double ln = 0.25 * std::log(20.0 * b.omegaS / std::numbers::pi) + 0.25 * std::log(b.omegaF / std::numbers::pi);
  const double direct =
      std::exp(ln - 0.5 * 20.0 * b.omegaS * xS * xS - 0.5 * b.omegaF * std::pow(xF - 0.5 * xS, 2));
  CHECK(std::abs(g.state.value(xS, xF)) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("static fidelity matches the determinant formula") {
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = gen::static_pair();
    const Eigen::Matrix2d A = oracle::ground_quad(oracle::spring_matrix(p, 0.0), oracle::mass_matrix(p), 1.0);
    const auto b = boa_frame(p, 0.0);
    const Eigen::Vector2d u(-b.slope, 1.0);
    Eigen::Matrix2d B = p.mF * b.omegaF * u * u.transpose();
    B(0, 0) += p.mS * b.omegaS;
    const double F = static_fidelity(p, 0.0);
    CHECK(F == doctest::Approx(oracle::real_fidelity(A, B)).epsilon(1e-12));
    CHECK(F <= 1.0);
    CHECK(F > 0.0);
  }
}

TEST_CASE("static fidelity is one without coupling and symmetric in the coupling sign") {
  for (int trial = 0; trial < 20; ++trial) {
    auto p = gen::static_pair();
    const double kI = springs_at(p, 0.0).kI.value;
    p.kI = 0.0;
    CHECK(std::abs(static_fidelity(p, 0.0) - 1.0) < 1e-14);
    p.kI = kI;
    const double F = static_fidelity(p, 0.0);
    p.kI = -kI;
    CHECK(static_fidelity(p, 0.0) == doctest::Approx(F).epsilon(1e-13));
  }
}

TEST_CASE("geometric quantities against quadrature of the fast ground state") {
  for (int trial = 0; trial < 10; ++trial) {
    auto p = gen::static_pair();
    p.units.hbar = gen::uniform(0.5, 2.0);
    const auto b = boa_frame(p, 0.0);
    const auto q = geometric_quantities(p, 0.0);
    CHECK(q.berryConnection == 0.0);
    // d/dxS phi0(xF - s xS) = -s phi0'(xT); integrate |.|^2 over xT.
    const double beta = p.mF * b.omegaF / p.units.hbar;
    const auto dphi2 = [&](double x) {
      const double phi = std::pow(beta / std::numbers::pi, 0.25) * std::exp(-0.5 * beta * x * x);
      return std::pow(b.slope * beta * x * phi, 2);
    };
    boost::math::quadrature::sinh_sinh<double> integrator;
    const double g = integrator.integrate(dphi2);
    const double kI = springs_at(p, 0.0).kI.value;
    const double kF = springs_at(p, 0.0).kappaF.value;
    CHECK(q.geometricTensor == doctest::Approx(g).epsilon(1e-10));
    CHECK(q.geometricTensor ==
          doctest::Approx(kI * kI * b.omegaF * p.mF / (2 * p.units.hbar * kF * kF)).epsilon(1e-12));
  }
}

TEST_CASE("invalid pairs are rejected") {
  OscillatorParams p;
  p.kI = 101.0;
  CHECK_THROWS_AS(exact_ground_state(p, 0.0), ValidityError);
  CHECK_THROWS_AS(boa_frame(p, 0.0), ValidityError);
  p.kI = 0.0;
  p.mS = 0.0;
  CHECK_THROWS_AS(normal_mode_frame(p, 0.0), DomainError);
}
