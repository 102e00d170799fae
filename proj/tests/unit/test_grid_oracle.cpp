#include "cbod/errors.hpp"
#include "cbod/grid_oracle.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cbod;

namespace {

SparseH oscillator(const Grid& g, double m, double w) {
  return build_hamiltonian(g, m, [&](double x) { return 0.5 * m * w * w * x * x; });
}

} // namespace

TEST_CASE("grid geometry") {
  const Grid g = Grid::line(2.0, 21);
  CHECK(g.dims() == 1);
  CHECK(g.size() == 21);
  CHECK(g.axis(0).spacing() == doctest::Approx(0.2));
  CHECK(g.axis(0).x(0) == -2.0);
  CHECK(g.axis(0).x(20) == doctest::Approx(2.0));
  CHECK(g.weights().sum() == doctest::Approx(4.0));

  const Grid p = Grid::plane(1.0, 16, 3.0, 32);
  CHECK(p.size() == 16 * 32);
  CHECK(p.index(2, 5) == 2 * 32 + 5);
  CHECK(p.weights().sum() == doctest::Approx(12.0));
  CHECK_FALSE(p == Grid::plane(1.0, 16, 3.0, 33));

  CHECK_THROWS_AS(Grid::line(1.0, 8), DomainError);
  CHECK_THROWS_AS(Grid::line(0.0, 32), DomainError);
}

TEST_CASE("oscillator levels on a line converge at second order") {
  const double m = 1.3, w = 4.0;
  const double ell = std::sqrt(1.0 / (m * w));
  double prevErr = 0.0;
  for (const int N : {257, 513}) {
    const Grid g = Grid::line(8 * ell, N);
    const auto e = lowest_eigenpairs(oscillator(g, m, w), 5);
    double err = 0.0;
    for (int n = 0; n < 5; ++n) {
      err = std::max(err, std::abs(e.values(n) - w * (n + 0.5)) / (w * (n + 0.5)));
    }
    CHECK(err < 2e-3);
    if (prevErr > 0.0) {
      CHECK(prevErr / err == doctest::Approx(4.0).epsilon(0.05));
    }
    prevErr = err;
  }
}

TEST_CASE("sparse Lanczos agrees with dense diagonalization") {
  const Grid g = Grid::plane(3.0, 48, 2.5, 48); // 2304 points: above the dense limit
  const SparseH H = build_hamiltonian(g, 2.0, 0.7, [](double x, double y) {
    return 3.0 * x * x + 5.0 * y * y - 2.0 * x * y + 0.3 * x;
  });
  const auto sparse = lowest_eigenpairs(H, 4);
  // The matrix is real here: a real dense solve, eigenvalues only, is the reference.
  const Eigen::MatrixXd real = Eigen::MatrixXcd(H).real();
  const Eigen::VectorXd dense = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(real, Eigen::EigenvaluesOnly).eigenvalues();
  for (int i = 0; i < 4; ++i) {
    CHECK(sparse.values(i) == doctest::Approx(dense(i)).epsilon(1e-10));
    const Eigen::VectorXcd v = sparse.vectors.col(i);
    CHECK((H * v - sparse.values(i) * v).norm() < 1e-8);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
  const auto near = eigenpairs_near(H, dense(2) + 1e-3, 1);
  CHECK(near.values(0) == doctest::Approx(dense(2)).epsilon(1e-10));
}

TEST_CASE("anticommutator is Hermitian and acts as -i hbar (2 x d/dx + 1)") {
  const Grid g = Grid::line(6.0, 1201);
  const SparseH A = anticommutator_xp(g, 0, 1.5);
  CHECK((Eigen::MatrixXcd(A) - Eigen::MatrixXcd(A).adjoint()).norm() == 0.0);
  const auto s = GaussianState1D::normalized({1.0, 0.0});
  const GridState psi = sample(g, s);
  const Eigen::VectorXcd out = A * psi.amplitudes;
  for (const int i : {400, 600, 750}) {
    const double x = g.axis(0).x(i);
    const cplx expected = cplx(0, -1.5) * (1.0 - 2.0 * x * x) * s.value(x);
    CHECK(std::abs(out(i) - expected) < 1e-4);
  }
  const Grid p = Grid::plane(2.0, 20, 2.0, 24);
  const SparseH Ay = anticommutator_xp(p, 1);
  CHECK((Eigen::MatrixXcd(Ay) - Eigen::MatrixXcd(Ay).adjoint()).norm() == 0.0);
  CHECK_THROWS_AS(anticommutator_xp(p, 2), DomainError);
}

TEST_CASE("coordinate products") {
  const Grid p = Grid::plane(2.0, 17, 3.0, 19);
  const SparseH X = coordinate_product(p, 0, 1);
  const Eigen::Index k = p.index(3, 11);
  CHECK(X.coeff(k, k).real() == doctest::Approx(p.axis(0).x(3) * p.axis(1).x(11)));
  CHECK(X.nonZeros() == p.size());
}

TEST_CASE("non-finite potentials are reported") {
  const Grid g = Grid::line(1.0, 17);
  CHECK_THROWS_AS(build_hamiltonian(g, 1.0, [](double x) { return 1.0 / x; }), DomainError);
  const Grid p = Grid::plane(1.0, 17, 1.0, 17);
  CHECK_THROWS_AS(build_hamiltonian(p, 1.0, 1.0, [](double, double) { return NAN; }), DomainError);
}

TEST_CASE("Crank-Nicolson: free spreading of a Gaussian") {
  const double m = 1.0, hbar = 1.0, T = 0.4;
  const Grid g = Grid::line(15.0, 2001);
  const auto s0 = GaussianState1D::normalized({4.0, 0.0});
  const SparseH H = build_hamiltonian(g, m, [](double) { return 0.0; });
  PropagationOptions o;
  o.staticHamiltonian = true;
  const auto r = propagate([&](double) { return H; }, sample(g, s0), T, 1e-4, o);
  // A(t) = A0 / (1 + i hbar A0 t / m)
  const cplx A = s0.quad / (1.0 + cplx(0, hbar * s0.quad.real() * T / m));
  const auto exact = GaussianState1D::normalized(A);
  GridState ref = sample(g, exact);
  CHECK(std::norm(overlap(ref.normalize(), r.state)) > 1 - 1e-6);
  CHECK(r.normDrift < 1e-10);
  CHECK_FALSE(r.leaked);
}

TEST_CASE("Crank-Nicolson: coherent state returns after one period in 2D") {
  const double w1 = 3.0, w2 = 6.0;
  const Grid g = Grid::plane(5.0, 128, 4.0, 64);
  const SparseH H = build_hamiltonian(g, 1.0, 1.0, [&](double x, double y) {
    return 0.5 * w1 * w1 * x * x + 0.5 * w2 * w2 * y * y;
  });
  // Ground state shifted by 1 along x: exact revival at 2 pi / w1.
  GridState psi{g, Eigen::VectorXcd(g.size())};
  for (int i = 0; i < 128; ++i) {
    for (int j = 0; j < 64; ++j) {
      const double x = g.axis(0).x(i) - 1.0, y = g.axis(1).x(j);
      psi.amplitudes(g.index(i, j)) = std::exp(-0.5 * w1 * x * x - 0.5 * w2 * y * y);
    }
  }
  psi.normalize();
  const double T = 2 * std::numbers::pi / w1;
  PropagationOptions o;
  o.staticHamiltonian = true;
  const auto r = propagate([&](double) { return H; }, psi, T, T / 2000, o);
  CHECK(std::norm(overlap(psi, r.state)) > 0.995);
  CHECK(r.normDrift < 1e-9);
  CHECK(r.steps == 2000);
}

TEST_CASE("grid overlaps and sampling") {
  const Grid g = Grid::line(8.0, 801);
  const auto a = GaussianState1D::normalized({1.5, 0.7}, 0.2);
  const auto b = GaussianState1D::normalized({0.8, -0.4});
  CHECK(std::abs(overlap(sample(g, a), sample(g, b)) - overlap(a, b)) < 1e-10);
  CHECK(sample(g, a).norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(overlap(sample(g, a), sample(Grid::line(8.0, 800), a)), DomainError);
  CHECK_THROWS_AS(sample(g, GaussianState2D{}), DomainError);

  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(g.size());
  CHECK(from_vector(g, v).norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(from_vector(g, Eigen::VectorXcd::Ones(3)), DomainError);
}

TEST_CASE("boundary probability") {
  const Grid g = Grid::line(1.0, 101);
  CHECK(boundary_probability(sample(g, GaussianState1D::normalized({400.0, 0.0}))) < 1e-100);
  GridState edge{g, Eigen::VectorXcd::Zero(g.size())};
  edge.amplitudes(0) = 1.0;
  edge.amplitudes(50) = 1.0;
  CHECK(boundary_probability(edge.normalize()) == doctest::Approx(1.0 / 3.0)); // trapezoid half weight at the end
}

TEST_CASE("tensor quadrature overlaps") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = GaussianState1D::normalized({gen::uniform(0.5, 5.0), gen::uniform(-2, 2)});
    const auto b = GaussianState1D::normalized({gen::uniform(0.5, 5.0), gen::uniform(-2, 2)}, 1.0);
    CHECK(std::abs(quadrature_overlap(a, b) - overlap(a, b)) < 1e-12);
  }
  Eigen::Matrix2cd A;
  A << cplx(2.0, 0.3), cplx(-0.5, 0.1), cplx(-0.5, 0.1), cplx(1.0, -0.2);
  const auto s = GaussianState2D::normalized(A);
  const auto t = GaussianState2D::normalized(Eigen::Matrix2cd::Identity() * 1.3);
  CHECK(std::abs(quadrature_overlap(s, t) - overlap(s, t)) < 1e-12);
}
