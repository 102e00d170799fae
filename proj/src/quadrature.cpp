#include "cbod/quadrature.hpp"

#include "cbod/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <memory>

namespace cbod {

namespace {

struct FixedDeleter {
  void operator()(gsl_integration_fixed_workspace* w) const { gsl_integration_fixed_free(w); }
};

QuadratureRule make_rule(const gsl_integration_fixed_type* type, int n, double a, double b, double alpha) {
  if (n < 1) {
    throw DomainError("quadrature needs at least one node");
  }
  gsl_set_error_handler_off();
  std::unique_ptr<gsl_integration_fixed_workspace, FixedDeleter> w(
      gsl_integration_fixed_alloc(type, static_cast<size_t>(n), a, b, alpha, 0.0));
  if (!w) {
    throw NumericalError("GSL could not build the quadrature rule");
  }
  const double* x = gsl_integration_fixed_nodes(w.get());
  const double* wt = gsl_integration_fixed_weights(w.get());
  return {std::vector<double>(x, x + n), std::vector<double>(wt, wt + n)};
}

} // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (!(b > a)) {
    throw DomainError("Gauss-Legendre interval must have b > a");
  }
  return make_rule(gsl_integration_fixed_legendre, n, a, b, 0.0);
}

QuadratureRule gauss_laguerre(int n, double alpha) {
  if (!(alpha > -1.0)) {
    throw DomainError("Gauss-Laguerre needs alpha > -1");
  }
  return make_rule(gsl_integration_fixed_laguerre, n, 0.0, 1.0, alpha);
}

} // namespace cbod
