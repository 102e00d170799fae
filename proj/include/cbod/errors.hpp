#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbod {

/// Argument outside the domain an operation is defined on (e.g. t outside [0, Tf]).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Physical parameters that leave the real-frequency regime.
class ValidityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two eigenvalues closer than the degeneracy tolerance of the spectral CD builder.
class DegeneracyError : public std::runtime_error {
public:
  DegeneracyError(std::size_t m, std::size_t n, double gap);

  std::size_t first() const noexcept { return m_; }
  std::size_t second() const noexcept { return n_; }
  double gap() const noexcept { return gap_; }

private:
  std::size_t m_;
  std::size_t n_;
  double gap_;
};

/// The Ermakov scaling factor reached b <= 0.
class SingularityError : public std::runtime_error {
public:
  explicit SingularityError(double time);
  double time() const noexcept { return time_; }

private:
  double time_;
};

/// Evaluation at (or numerically on top of) a radial node, where the g-derivative bracket diverges.
class PoleError : public std::runtime_error {
public:
  PoleError(double radius, double node);
  double radius() const noexcept { return radius_; }
  double node() const noexcept { return node_; }

private:
  double radius_;
  double node_;
};

/// Linear solve, quadrature or eigensolver failure.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace cbod
