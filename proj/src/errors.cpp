#include "cbod/errors.hpp"

#include <sstream>

namespace cbod {

namespace {

std::string degeneracy_message(std::size_t m, std::size_t n, double gap) {
  std::ostringstream msg;
  msg << "eigenvalues " << m << " and " << n << " are degenerate (gap " << gap << ")";
  return msg.str();
}

std::string pole_message(double radius, double node) {
  std::ostringstream msg;
  msg << "g-derivative bracket evaluated at r=" << radius << ", on the radial node r=" << node;
  return msg.str();
}

} // namespace

DegeneracyError::DegeneracyError(std::size_t m, std::size_t n, double gap)
    : std::runtime_error(degeneracy_message(m, n, gap)), m_(m), n_(n), gap_(gap) {}

SingularityError::SingularityError(double time)
    : std::runtime_error("Ermakov scaling factor crossed zero at t=" + std::to_string(time)), time_(time) {}

PoleError::PoleError(double radius, double node)
    : std::runtime_error(pole_message(radius, node)), radius_(radius), node_(node) {}

} // namespace cbod
