#pragma once

// Finite-difference Hamiltonians, eigensolvers and Crank-Nicolson propagation on uniform grids.

#include "cbod/gaussian.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace cbod {

struct Axis {
  double L = 1.0; // half-width, points at -L ... L
  int N = 16;

  double spacing() const { return 2.0 * L / (N - 1); }
  double x(int i) const { return -L + i * spacing(); }
  bool operator==(const Axis&) const = default;
};

/// One or two axes; 2D points are stored row-major, index = i * N1 + j.
class Grid {
public:
  static Grid line(double L, int N);
  static Grid plane(double L0, int N0, double L1, int N1);

  int dims() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int d) const { return axes_.at(static_cast<std::size_t>(d)); }
  Eigen::Index size() const;
  Eigen::Index index(int i, int j) const { return static_cast<Eigen::Index>(i) * axes_.back().N + j; }
  /// Trapezoid-rule weight of each point.
  Eigen::VectorXd weights() const;
  bool operator==(const Grid&) const = default;

private:
  explicit Grid(std::vector<Axis> axes);
  std::vector<Axis> axes_;
};

struct GridState {
  Grid grid;
  Eigen::VectorXcd amplitudes;

  double norm() const;
  GridState& normalize();
};

using SparseH = Eigen::SparseMatrix<cplx>;
using Potential1D = std::function<double(double)>;
using Potential2D = std::function<double(double, double)>;

/// -hbar^2/(2m) d^2 by three-point differences with zero values beyond the end points, plus V on the diagonal.
/// Throws DomainError naming the point if V is not finite.
SparseH build_hamiltonian(const Grid& grid, double mass, const Potential1D& V, double hbar = 1.0);
SparseH build_hamiltonian(const Grid& grid, double m0, double m1, const Potential2D& V, double hbar = 1.0);

/// {x, p} = -i hbar (x d + d x) along one axis with the central first-difference d. Hermitian.
SparseH anticommutator_xp(const Grid& grid, int axis, double hbar = 1.0);

/// x_axis^2 as a diagonal matrix; used to build ramp derivatives.
SparseH coordinate_product(const Grid& grid, int axisA, int axisB);

struct Eigenpairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // orthonormal columns (Euclidean)
};

/// Dense solve up to dimension 2048; shift-invert Lanczos on a sparse LU above that.
Eigenpairs lowest_eigenpairs(const SparseH& H, int k);
Eigenpairs lowest_eigenpairs(const Eigen::MatrixXcd& H, int k);
/// The k eigenpairs closest to `shift`, returned in ascending order.
Eigenpairs eigenpairs_near(const SparseH& H, double shift, int k);

using HamiltonianOfTime = std::function<SparseH(double)>;

struct PropagationOptions {
  double hbar = 1.0;
  bool staticHamiltonian = false; // factor once
  double solverTol = 1e-14;
  int leakCheckInterval = 50;
  double leakThreshold = 1e-10;
};

struct PropagationResult {
  GridState state;
  int steps = 0;
  double normDrift = 0.0;       // |norm(final) - norm(initial)| (Euclidean)
  double boundaryProbability = 0.0; // largest probability within 2 cells of a wall
  bool leaked = false;
  int directSolves = 0;          // steps where the iterative solver fell back to LU
};

/// Crank-Nicolson with the midpoint Hamiltonian H(t + dt/2). dt is shrunk so that Tf/dt is an integer.
PropagationResult propagate(const HamiltonianOfTime& H, const GridState& psi0, double Tf, double dt,
                            const PropagationOptions& opts = {});

/// Trapezoid-rule <a|b>; throws DomainError on grid mismatch.
cplx overlap(const GridState& a, const GridState& b);

GridState sample(const Grid& grid, const GaussianState1D& s);
GridState sample(const Grid& grid, const GaussianState2D& s);
/// Eigenvector column rescaled to unit trapezoid norm.
GridState from_vector(const Grid& grid, const Eigen::VectorXcd& v);

/// Probability within `cells` points of any wall.
double boundary_probability(const GridState& s, int cells = 2);

/// <a|b> of two Gaussians by tensor Gauss-Legendre quadrature over +-8 widths.
cplx quadrature_overlap(const GaussianState1D& a, const GaussianState1D& b, int nodes = 200);
cplx quadrature_overlap(const GaussianState2D& a, const GaussianState2D& b, int nodes = 200);

} // namespace cbod
