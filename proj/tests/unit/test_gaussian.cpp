#include "cbod/errors.hpp"
#include "cbod/gaussian.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace cbod;

namespace {

GaussianState1D random_1d() {
  return GaussianState1D::normalized({gen::log_uniform(0.1, 10.0), gen::uniform(-5.0, 5.0)},
                                     gen::uniform(0.0, 2 * std::numbers::pi));
}

GaussianState2D random_2d() {
  Eigen::Matrix2d L;
  L << gen::uniform(0.4, 2.0), 0.0, gen::uniform(-1.0, 1.0), gen::uniform(0.4, 2.0);
  Eigen::Matrix2d I;
  I << gen::uniform(-2.0, 2.0), gen::uniform(-1.0, 1.0), 0.0, gen::uniform(-2.0, 2.0);
  I(1, 0) = I(0, 1);
  return GaussianState2D::normalized((L * L.transpose()).cast<cplx>() + cplx(0, 1) * I.cast<cplx>(),
                                     gen::uniform(0.0, 6.0));
}

// Far tails underflow to exp(-inf) times an overflowing phase; those points contribute zero.
cplx integrate_1d(const std::function<cplx(double)>& f) {
  boost::math::quadrature::sinh_sinh<double> q;
  const auto g = [&](double x) {
    const cplx v = f(x);
    return std::isfinite(v.real()) && std::isfinite(v.imag()) ? v : cplx(0.0);
  };
  return {q.integrate([&](double x) { return g(x).real(); }), q.integrate([&](double x) { return g(x).imag(); })};
}

cplx integrate_2d(const std::function<cplx(double, double)>& f) {
  return integrate_1d([&](double x) { return integrate_1d([&](double y) { return f(x, y); }); });
}

} // namespace

TEST_CASE("normalized states have unit norm by quadrature") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_1d();
    CHECK(std::abs(integrate_1d([&](double x) { return std::norm(s.value(x)); }) - 1.0) < 1e-10);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = random_2d();
    CHECK(std::abs(integrate_2d([&](double x, double y) { return std::norm(s.value(x, y)); }) - 1.0) < 1e-9);
  }
}

TEST_CASE("closed-form overlaps match quadrature") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_1d();
    const auto b = random_1d();
    const cplx q = integrate_1d([&](double x) { return std::conj(a.value(x)) * b.value(x); });
    CHECK(std::abs(overlap(a, b) - q) < 1e-10);
    CHECK(fidelity(a, b) == doctest::Approx(std::norm(q)).epsilon(1e-9));
  }
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = random_2d();
    const auto b = random_2d();
    const cplx q = integrate_2d([&](double x, double y) { return std::conj(a.value(x, y)) * b.value(x, y); });
    CHECK(std::abs(overlap(a, b) - q) < 1e-9);
  }
}

TEST_CASE("fidelity properties") {
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_2d();
    const auto b = random_2d();
    const double f = fidelity(a, b);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-14);
    CHECK(fidelity(b, a) == doctest::Approx(f).epsilon(1e-12));
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::norm(overlap(a, b)) == doctest::Approx(f).epsilon(1e-10));
  }
}

TEST_CASE("pull_back changes variables and keeps the norm") {
  for (int trial = 0; trial < 30; ++trial) {
    const auto z = random_2d();
    Eigen::Matrix2d M;
    M << gen::uniform(0.5, 2.0), gen::uniform(-1.0, 1.0), gen::uniform(-1.0, 1.0), gen::uniform(0.5, 2.0);
    if (std::abs(M.determinant()) < 0.2) {
      continue;
    }
    const auto x = pull_back(z, M);
    CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::Vector2d p(gen::uniform(-1, 1), gen::uniform(-1, 1));
    const Eigen::Vector2d zp = M * p;
    const cplx expected = z.value(zp(0), zp(1)) * std::sqrt(std::abs(M.determinant()));
    CHECK(std::abs(x.value(p(0), p(1)) - expected) < 1e-12 * std::abs(expected) + 1e-300);
  }
}

TEST_CASE("product states and marginal widths") {
  const auto a = GaussianState1D::normalized({2.0, 0.5});
  const auto b = GaussianState1D::normalized({0.5, -1.0}, 0.3);
  const auto ab = product_state(a, b);
  CHECK(std::abs(ab.value(0.2, -0.4) - a.value(0.2) * b.value(-0.4)) < 1e-14);
  const Eigen::Vector2d w = marginal_widths(ab);
  CHECK(w(0) == doctest::Approx(std::sqrt(1.0 / (2 * 2.0))));
  CHECK(w(1) == doctest::Approx(std::sqrt(1.0 / (2 * 0.5))));

  const auto s = random_2d();
  const double var = integrate_2d([&](double x, double y) { return x * x * std::norm(s.value(x, y)); }).real();
  CHECK(marginal_widths(s)(0) == doctest::Approx(std::sqrt(var)).epsilon(1e-8));
}

TEST_CASE("non-normalizable quadratic forms are rejected") {
  CHECK_THROWS_AS(GaussianState1D::normalized({-1.0, 0.0}), DomainError);
  Eigen::Matrix2cd A;
  A << 1.0, 2.0, 2.0, 1.0; // indefinite real part
  CHECK_THROWS_AS(GaussianState2D::normalized(A), DomainError);
  GaussianState2D raw;
  raw.quad = A;
  CHECK_FALSE(raw.normalizable());
}
