#include "cbod/grid_oracle.hpp"

#include "cbod/errors.hpp"
#include "cbod/quadrature.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace cbod {

namespace {

constexpr Eigen::Index kDenseLimit = 2048;

using Triplet = Eigen::Triplet<cplx>;

void check_axis(const Axis& a) {
  if (a.N < 16) {
    throw DomainError("grid axes need at least 16 points");
  }
  if (!(a.L > 0.0) || !std::isfinite(a.L)) {
    throw DomainError("grid half-width must be positive");
  }
}

// Three-point second difference along one axis, scaled by -hbar^2/(2m).
void add_kinetic(std::vector<Triplet>& t, const Grid& g, int axis, double mass, double hbar) {
  const Axis& ax = g.axis(axis);
  const double c = hbar * hbar / (2.0 * mass * ax.spacing() * ax.spacing());
  const int n0 = g.axis(0).N;
  const int n1 = g.dims() == 2 ? g.axis(1).N : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const Eigen::Index row = g.dims() == 2 ? g.index(i, j) : i;
      t.emplace_back(row, row, 2.0 * c);
      const int k = axis == 0 ? i : j;
      if (k + 1 < ax.N) {
        const Eigen::Index col = g.dims() == 2 ? (axis == 0 ? g.index(i + 1, j) : g.index(i, j + 1)) : i + 1;
        t.emplace_back(row, col, -c);
        t.emplace_back(col, row, -c);
      }
    }
  }
}

void throw_bad_potential(double v, double x, double y, int dims) {
  std::ostringstream msg;
  msg << "potential is " << v << " at x=" << x;
  if (dims == 2) {
    msg << ", y=" << y;
  }
  throw DomainError(msg.str());
}

Eigenpairs dense_lowest(const Eigen::MatrixXcd& H, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("dense eigensolver failed");
  }
  return {eig.eigenvalues().head(k), eig.eigenvectors().leftCols(k)};
}

// Lanczos with full reorthogonalization on (H - shift)^{-1}.
// `lowest` keeps the largest positive Ritz values, otherwise the largest in magnitude.
Eigenpairs shift_invert(const SparseH& H, double shift, int k, bool lowest) {
  const Eigen::Index n = H.rows();
  SparseH I(n, n);
  I.setIdentity();
  SparseH A = H - cplx(shift) * I;
  A.makeCompressed();
  Eigen::SparseLU<SparseH> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("sparse LU of the shifted Hamiltonian failed");
  }

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXcd start(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    start(i) = cplx(unif(rng), 0.0);
  }
  start.normalize();

  Eigen::Index m = std::min<Eigen::Index>(n, std::max<Eigen::Index>(3 * k + 30, 80));
  for (;;) {
    Eigen::MatrixXcd V(n, m + 1);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    V.col(0) = start;
    Eigen::Index used = m;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXcd w = lu.solve(V.col(j));
      alpha(j) = V.col(j).dot(w).real();
      for (int pass = 0; pass < 2; ++pass) {
        w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
      }
      beta(j) = w.norm();
      if (beta(j) < 1e-13 * std::abs(alpha(j)) || j + 1 == n) {
        used = j + 1;
        break;
      }
      V.col(j + 1) = w / beta(j);
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
    for (Eigen::Index j = 0; j < used; ++j) {
      T(j, j) = alpha(j);
      if (j + 1 < used) {
        T(j, j + 1) = beta(j);
        T(j + 1, j) = beta(j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
    const Eigen::VectorXd& theta = tri.eigenvalues();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(used));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return lowest ? theta(a) > theta(b) : std::abs(theta(a)) > std::abs(theta(b));
    });
    const int take = static_cast<int>(std::min<Eigen::Index>(k, used));

    bool converged = true;
    for (int i = 0; i < take; ++i) {
      const Eigen::Index c = order[static_cast<std::size_t>(i)];
      const double resid = std::abs(beta(used - 1) * tri.eigenvectors()(used - 1, c));
      converged = converged && resid <= 1e-12 * std::abs(theta(c));
    }

    if (converged || used < m || m == n) {
      Eigenpairs out;
      out.values.resize(take);
      out.vectors.resize(n, take);
      for (int i = 0; i < take; ++i) {
        const Eigen::Index c = order[static_cast<std::size_t>(i)];
        Eigen::VectorXcd v = V.leftCols(used) * tri.eigenvectors().col(c).cast<cplx>();
        v.normalize();
        out.vectors.col(i) = v;
        out.values(i) = v.dot(H * v).real();
      }
      std::vector<int> asc(static_cast<std::size_t>(take));
      std::iota(asc.begin(), asc.end(), 0);
      std::sort(asc.begin(), asc.end(), [&](int a, int b) { return out.values(a) < out.values(b); });
      Eigenpairs sorted;
      sorted.values.resize(take);
      sorted.vectors.resize(n, take);
      for (int i = 0; i < take; ++i) {
        sorted.values(i) = out.values(asc[static_cast<std::size_t>(i)]);
        sorted.vectors.col(i) = out.vectors.col(asc[static_cast<std::size_t>(i)]);
      }
      return sorted;
    }
    m = std::min(n, 2 * m);
  }
}

double gershgorin_lower(const SparseH& H) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(H.rows());
  Eigen::VectorXd off = Eigen::VectorXd::Zero(H.rows());
  for (int c = 0; c < H.outerSize(); ++c) {
    for (SparseH::InnerIterator it(H, c); it; ++it) {
      if (it.row() == it.col()) {
        diag(it.row()) = it.value().real();
      } else {
        off(it.row()) += std::abs(it.value());
      }
    }
  }
  return (diag - off).minCoeff();
}

} // namespace

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  for (const auto& a : axes_) {
    check_axis(a);
  }
}

Grid Grid::line(double L, int N) {
  return Grid({Axis{L, N}});
}

Grid Grid::plane(double L0, int N0, double L1, int N1) {
  return Grid({Axis{L0, N0}, Axis{L1, N1}});
}

Eigen::Index Grid::size() const {
  Eigen::Index n = 1;
  for (const auto& a : axes_) {
    n *= a.N;
  }
  return n;
}

Eigen::VectorXd Grid::weights() const {
  const auto axisWeights = [](const Axis& a) {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(a.N, a.spacing());
    w(0) *= 0.5;
    w(a.N - 1) *= 0.5;
    return w;
  };
  if (dims() == 1) {
    return axisWeights(axes_[0]);
  }
  const Eigen::VectorXd w0 = axisWeights(axes_[0]);
  const Eigen::VectorXd w1 = axisWeights(axes_[1]);
  Eigen::VectorXd w(size());
  for (int i = 0; i < axes_[0].N; ++i) {
    for (int j = 0; j < axes_[1].N; ++j) {
      w(index(i, j)) = w0(i) * w1(j);
    }
  }
  return w;
}

double GridState::norm() const {
  return (grid.weights().array() * amplitudes.array().abs2()).sum();
}

GridState& GridState::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("cannot normalize a grid state with zero or non-finite norm");
  }
  amplitudes /= std::sqrt(n);
  return *this;
}

SparseH build_hamiltonian(const Grid& grid, double mass, const Potential1D& V, double hbar) {
  if (grid.dims() != 1) {
    throw DomainError("1D Hamiltonian needs a 1D grid");
  }
  if (!(mass > 0.0)) {
    throw DomainError("mass must be positive");
  }
  std::vector<Triplet> t;
  add_kinetic(t, grid, 0, mass, hbar);
  const Axis& ax = grid.axis(0);
  for (int i = 0; i < ax.N; ++i) {
    const double v = V(ax.x(i));
    if (!std::isfinite(v)) {
      throw_bad_potential(v, ax.x(i), 0.0, 1);
    }
    t.emplace_back(i, i, v);
  }
  SparseH H(grid.size(), grid.size());
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

SparseH build_hamiltonian(const Grid& grid, double m0, double m1, const Potential2D& V, double hbar) {
  if (grid.dims() != 2) {
    throw DomainError("2D Hamiltonian needs a 2D grid");
  }
  if (!(m0 > 0.0) || !(m1 > 0.0)) {
    throw DomainError("masses must be positive");
  }
  std::vector<Triplet> t;
  add_kinetic(t, grid, 0, m0, hbar);
  add_kinetic(t, grid, 1, m1, hbar);
  const Axis& a0 = grid.axis(0);
  const Axis& a1 = grid.axis(1);
  for (int i = 0; i < a0.N; ++i) {
    for (int j = 0; j < a1.N; ++j) {
      const double v = V(a0.x(i), a1.x(j));
      if (!std::isfinite(v)) {
        throw_bad_potential(v, a0.x(i), a1.x(j), 2);
      }
      t.emplace_back(grid.index(i, j), grid.index(i, j), v);
    }
  }
  SparseH H(grid.size(), grid.size());
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

SparseH anticommutator_xp(const Grid& grid, int axis, double hbar) {
  if (axis < 0 || axis >= grid.dims()) {
    throw DomainError("axis out of range");
  }
  const Axis& ax = grid.axis(axis);
  const double inv2h = 1.0 / (2.0 * ax.spacing());
  const int n0 = grid.axis(0).N;
  const int n1 = grid.dims() == 2 ? grid.axis(1).N : 1;
  const cplx mih(0.0, -hbar);
  std::vector<Triplet> t;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const int k = axis == 0 ? i : j;
      if (k + 1 >= ax.N) {
        continue;
      }
      const Eigen::Index row = grid.dims() == 2 ? grid.index(i, j) : i;
      const Eigen::Index col = grid.dims() == 2 ? (axis == 0 ? grid.index(i + 1, j) : grid.index(i, j + 1)) : i + 1;
      // (x d + d x)_{row,col} = (x_row + x_col) / 2h, antisymmetric.
      const double s = (ax.x(k) + ax.x(k + 1)) * inv2h;
      t.emplace_back(row, col, mih * s);
      t.emplace_back(col, row, -mih * s);
    }
  }
  SparseH A(grid.size(), grid.size());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SparseH coordinate_product(const Grid& grid, int axisA, int axisB) {
  if (axisA < 0 || axisA >= grid.dims() || axisB < 0 || axisB >= grid.dims()) {
    throw DomainError("axis out of range");
  }
  std::vector<Triplet> t;
  const int n0 = grid.axis(0).N;
  const int n1 = grid.dims() == 2 ? grid.axis(1).N : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const double xs[2] = {grid.axis(0).x(i), grid.dims() == 2 ? grid.axis(1).x(j) : 0.0};
      const Eigen::Index row = grid.dims() == 2 ? grid.index(i, j) : i;
      t.emplace_back(row, row, xs[axisA] * xs[axisB]);
    }
  }
  SparseH X(grid.size(), grid.size());
  X.setFromTriplets(t.begin(), t.end());
  return X;
}

Eigenpairs lowest_eigenpairs(const Eigen::MatrixXcd& H, int k) {
  if (k < 1 || k > H.rows()) {
    throw DomainError("eigenpair count must be in [1, dimension]");
  }
  return dense_lowest(H, k);
}

Eigenpairs lowest_eigenpairs(const SparseH& H, int k) {
  if (k < 1 || k > H.rows()) {
    throw DomainError("eigenpair count must be in [1, dimension]");
  }
  if (H.rows() <= kDenseLimit) {
    return dense_lowest(Eigen::MatrixXcd(H), k);
  }
  const double lower = gershgorin_lower(H);
  return shift_invert(H, lower - 1e-6 * (std::abs(lower) + 1.0), k, true);
}

Eigenpairs eigenpairs_near(const SparseH& H, double shift, int k) {
  if (k < 1 || k > H.rows()) {
    throw DomainError("eigenpair count must be in [1, dimension]");
  }
  if (H.rows() > kDenseLimit) {
    return shift_invert(H, shift, k, false);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig{Eigen::MatrixXcd(H)};
  if (eig.info() != Eigen::Success) {
    throw NumericalError("dense eigensolver failed");
  }
  const Eigen::VectorXd& e = eig.eigenvalues();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(e.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return std::abs(e(a) - shift) < std::abs(e(b) - shift); });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  Eigenpairs out;
  out.values.resize(k);
  out.vectors.resize(H.rows(), k);
  for (int i = 0; i < k; ++i) {
    out.values(i) = e(idx[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = eig.eigenvectors().col(idx[static_cast<std::size_t>(i)]);
  }
  return out;
}

PropagationResult propagate(const HamiltonianOfTime& H, const GridState& psi0, double Tf, double dt,
                            const PropagationOptions& opts) {
  if (!(dt > 0.0)) {
    throw DomainError("time step must be positive");
  }
  if (!(Tf >= 0.0)) {
    throw DomainError("propagation time must be non-negative");
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(Tf / dt - 1e-9)));
  const double h = Tf / steps;
  const Eigen::Index n = psi0.grid.size();
  if (psi0.amplitudes.size() != n) {
    throw DomainError("state size does not match its grid");
  }

  SparseH I(n, n);
  I.setIdentity();
  const cplx c(0.0, 0.5 * h / opts.hbar);

  PropagationResult out{psi0};
  Eigen::VectorXcd psi = psi0.amplitudes;
  const double norm0 = psi.squaredNorm();
  const bool direct = psi0.grid.dims() == 1;

  Eigen::SparseLU<SparseH> lu;
  Eigen::BiCGSTAB<SparseH, Eigen::DiagonalPreconditioner<cplx>> iter;
  iter.setTolerance(opts.solverTol);
  iter.setMaxIterations(500);
  SparseH Hcur;
  bool factored = false;

  const auto leak_check = [&]() {
    GridState s{psi0.grid, psi};
    out.boundaryProbability = std::max(out.boundaryProbability, boundary_probability(s));
  };

  for (int step = 0; step < steps; ++step) {
    if (!opts.staticHamiltonian || step == 0) {
      Hcur = H(h * (step + 0.5));
      if (Hcur.rows() != n || Hcur.cols() != n) {
        throw DomainError("Hamiltonian size does not match the grid");
      }
      factored = false;
    }
    const Eigen::VectorXcd rhs = psi - c * (Hcur * psi);
    SparseH A = I + c * Hcur;
    A.makeCompressed();

    if (direct || opts.staticHamiltonian) {
      if (!factored) {
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
          throw NumericalError("Crank-Nicolson LU factorization failed");
        }
        factored = true;
      }
      psi = lu.solve(rhs);
    } else {
      iter.compute(A);
      Eigen::VectorXcd next = iter.solveWithGuess(rhs, psi);
      if (iter.info() != Eigen::Success || !(iter.error() <= opts.solverTol)) {
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
          throw NumericalError("Crank-Nicolson linear solve failed");
        }
        next = lu.solve(rhs);
        ++out.directSolves;
      }
      psi = next;
    }
    if (!psi.allFinite()) {
      throw NumericalError("Crank-Nicolson produced non-finite amplitudes");
    }
    if (opts.leakCheckInterval > 0 && (step + 1) % opts.leakCheckInterval == 0) {
      leak_check();
    }
  }
  leak_check();

  out.steps = steps;
  out.normDrift = std::abs(psi.squaredNorm() - norm0) / norm0;
  out.leaked = out.boundaryProbability > opts.leakThreshold;
  out.state.amplitudes = psi;
  return out;
}

cplx overlap(const GridState& a, const GridState& b) {
  if (!(a.grid == b.grid)) {
    throw DomainError("overlap of states on different grids");
  }
  const Eigen::VectorXd w = a.grid.weights();
  return (a.amplitudes.conjugate().array() * w.array().cast<cplx>() * b.amplitudes.array()).sum();
}

GridState sample(const Grid& grid, const GaussianState1D& s) {
  if (grid.dims() != 1) {
    throw DomainError("1D state needs a 1D grid");
  }
  GridState out{grid, Eigen::VectorXcd(grid.size())};
  for (int i = 0; i < grid.axis(0).N; ++i) {
    out.amplitudes(i) = s.value(grid.axis(0).x(i));
  }
  return out;
}

GridState sample(const Grid& grid, const GaussianState2D& s) {
  if (grid.dims() != 2) {
    throw DomainError("2D state needs a 2D grid");
  }
  GridState out{grid, Eigen::VectorXcd(grid.size())};
  for (int i = 0; i < grid.axis(0).N; ++i) {
    for (int j = 0; j < grid.axis(1).N; ++j) {
      out.amplitudes(grid.index(i, j)) = s.value(grid.axis(0).x(i), grid.axis(1).x(j));
    }
  }
  return out;
}

GridState from_vector(const Grid& grid, const Eigen::VectorXcd& v) {
  if (v.size() != grid.size()) {
    throw DomainError("vector size does not match the grid");
  }
  GridState s{grid, v};
  return s.normalize();
}

double boundary_probability(const GridState& s, int cells) {
  const Grid& g = s.grid;
  const Eigen::VectorXd w = g.weights();
  const double total = (w.array() * s.amplitudes.array().abs2()).sum();
  const auto nearWall = [cells](int k, int N) { return k < cells || k >= N - cells; };
  double edge = 0.0;
  const int n0 = g.axis(0).N;
  const int n1 = g.dims() == 2 ? g.axis(1).N : 1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const bool wall = nearWall(i, n0) || (g.dims() == 2 && nearWall(j, n1));
      if (wall) {
        const Eigen::Index idx = g.dims() == 2 ? g.index(i, j) : i;
        edge += w(idx) * std::norm(s.amplitudes(idx));
      }
    }
  }
  return edge / total;
}

cplx quadrature_overlap(const GaussianState1D& a, const GaussianState1D& b, int nodes) {
  const double width = 1.0 / std::sqrt(a.quad.real() + b.quad.real());
  const auto rule = gauss_legendre(nodes, -8.0 * width, 8.0 * width);
  cplx sum(0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * std::conj(a.value(rule.nodes[i])) * b.value(rule.nodes[i]);
  }
  return sum;
}

cplx quadrature_overlap(const GaussianState2D& a, const GaussianState2D& b, int nodes) {
  // Integrand envelope exp(-x^T S x / 2) with S = Re(A) + Re(B); its widths set the box.
  const Eigen::Matrix2d cov = (a.quad.real() + b.quad.real()).inverse();
  const auto r0 = gauss_legendre(nodes, -8.0 * std::sqrt(cov(0, 0)), 8.0 * std::sqrt(cov(0, 0)));
  const auto r1 = gauss_legendre(nodes, -8.0 * std::sqrt(cov(1, 1)), 8.0 * std::sqrt(cov(1, 1)));
  cplx sum(0.0);
  for (std::size_t i = 0; i < r0.nodes.size(); ++i) {
    cplx row(0.0);
    for (std::size_t j = 0; j < r1.nodes.size(); ++j) {
      row += r1.weights[j] * std::conj(a.value(r0.nodes[i], r1.nodes[j])) * b.value(r0.nodes[i], r1.nodes[j]);
    }
    sum += r0.weights[i] * row;
  }
  return sum;
}

} // namespace cbod
