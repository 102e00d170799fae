#include "cbod/coulomb.hpp"

#include "cbod/errors.hpp"
#include "cbod/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cbod {

namespace {

constexpr int kLaguerreNodes = 200;

double factorial(int k) {
  return std::tgamma(k + 1.0);
}

double pochhammer(double a, int k) {
  return std::tgamma(a + k) / std::tgamma(a);
}

double prefactor(const HydrogenicState& s) {
  const int k = s.n - s.l - 1;
  const double a = 2.0 * s.mF * s.g / (s.units.hbar * s.units.hbar * s.n);
  return std::pow(a, 1.5) * std::sqrt(factorial(k) / (2.0 * s.n * factorial(s.n + s.l)));
}

// R = prefactor * exp(-x/2) * x^l * L_k(x); this is everything but the exponential.
double polynomial_part(const HydrogenicState& s, double x) {
  return prefactor(s) * std::pow(x, s.l) * generalized_laguerre(s.n - s.l - 1, 2.0 * s.l + 1.0, x);
}

// (3/2 - x/2 + n - 1) L_k - (n + l) L_{k-1}; g dR/dg without the pole of the ratio form.
double derivative_numerator(const HydrogenicState& s, double x) {
  const int k = s.n - s.l - 1;
  const double alpha = 2.0 * s.l + 1.0;
  return (1.5 - 0.5 * x + (s.n - 1)) * generalized_laguerre(k, alpha, x) -
         (s.n + s.l) * generalized_laguerre(k - 1, alpha, x);
}

// g dR/dg without the exponential.
double derivative_polynomial_part(const HydrogenicState& s, double x) {
  return prefactor(s) * std::pow(x, s.l) * derivative_numerator(s, x);
}

void check_compatible(const HydrogenicState& a, const HydrogenicState& b) {
  a.check();
  b.check();
  if (a.g != b.g || a.mF != b.mF || a.units.hbar != b.units.hbar) {
    throw DomainError("radial integrals need states with the same g, mF and hbar");
  }
}

// int_0^inf e^{-rate r} pa(r) pb(r) f(r) r^2 dr
template <class PA, class PB>
double laguerre_integral(double rate, PA pa, PB pb, const std::function<double(double)>& f) {
  static const QuadratureRule rule = gauss_laguerre(kLaguerreNodes, 2.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i] / rate;
    const double w = rule.weights[i];
    if (w == 0.0) {
      continue;
    }
    sum += w * pa(r) * pb(r) * (f ? f(r) : 1.0);
  }
  return sum / (rate * rate * rate);
}

} // namespace

void HydrogenicState::check() const {
  if (n < 1 || l < 0 || l >= n) {
    std::ostringstream msg;
    msg << "invalid hydrogenic quantum numbers (n=" << n << ", l=" << l << ")";
    throw DomainError(msg.str());
  }
  if (!(g > 0.0) || !(mF > 0.0)) {
    throw DomainError("hydrogenic state needs g > 0 and mF > 0");
  }
  units.check();
}

double HydrogenicState::scaled_radius(double r) const {
  return 2.0 * mF * g * r / (units.hbar * units.hbar * n);
}

double generalized_laguerre(int k, double alpha, double x) {
  if (k < 0) {
    return 0.0;
  }
  double prev = 1.0;
  if (k == 0) {
    return prev;
  }
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double radial_wavefunction(const HydrogenicState& s, double r) {
  s.check();
  if (!(r >= 0.0)) {
    throw DomainError("radius must be non-negative");
  }
  const double x = s.scaled_radius(r);
  return std::exp(-0.5 * x) * polynomial_part(s, x);
}

double hydrogenic_energy(const HydrogenicState& s) {
  s.check();
  return -s.mF * s.g * s.g / (2.0 * s.units.hbar * s.units.hbar * s.n * s.n);
}

double slow_total_energy(const HydrogenicState& s, double omegaS, int u) {
  if (u < 0) {
    throw DomainError("slow quantum number must be non-negative");
  }
  return s.units.hbar * omegaS * (u + 1.5) + hydrogenic_energy(s);
}

std::vector<double> radial_nodes(const HydrogenicState& s) {
  s.check();
  const int k = s.n - s.l - 1;
  if (k == 0) {
    return {};
  }
  // Gauss-Laguerre nodes are the zeros of L_k^alpha.
  const auto rule = gauss_laguerre(k, 2.0 * s.l + 1.0);
  const double scale = s.units.hbar * s.units.hbar * s.n / (2.0 * s.mF * s.g);
  std::vector<double> out;
  for (const double x : rule.nodes) {
    out.push_back(x * scale);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double radial_g_derivative(const HydrogenicState& s, double r) {
  s.check();
  if (!(r >= 0.0)) {
    throw DomainError("radius must be non-negative");
  }
  const int k = s.n - s.l - 1;
  const double alpha = 2.0 * s.l + 1.0;
  const double x = s.scaled_radius(r);
  const double Lk = generalized_laguerre(k, alpha, x);
  const double Lkm1 = generalized_laguerre(k - 1, alpha, x);
  const double scale = std::abs(Lk) + (s.n + s.l) * std::abs(Lkm1);
  if (std::abs(Lk) < 1e-9 * scale) {
    const auto nodes = radial_nodes(s);
    const auto nearest = std::min_element(nodes.begin(), nodes.end(),
                                          [r](double a, double b) { return std::abs(a - r) < std::abs(b - r); });
    throw PoleError(r, nearest == nodes.end() ? r : *nearest);
  }
  return 1.5 - 0.5 * x + (s.n - 1) - (s.n + s.l) * Lkm1 / Lk;
}

double g_times_dR_dg(const HydrogenicState& s, double r) {
  s.check();
  if (!(r >= 0.0)) {
    throw DomainError("radius must be non-negative");
  }
  const double x = s.scaled_radius(r);
  return std::exp(-0.5 * x) * derivative_polynomial_part(s, x);
}

double berry_connection_formula(const HydrogenicState& s, double gdot) {
  s.check();
  const int n = s.n;
  const int l = s.l;
  const double hbar = s.units.hbar;
  double bracket = 0.5 - 0.5 * n - l * (l + 1.0) / (2.0 * n);
  if (n - l - 2 >= 0) {
    const double lead = 2.0 * s.g * s.g * s.mF * s.mF * (n + 1.0) / (std::pow(hbar, 4) * n * n * n);
    const double comb = std::tgamma(2.0 * l + 2.0) * pochhammer(1.0, n - l - 2) * pochhammer(2.0 * l + 2.0, n - l - 1) /
                        (factorial(n - l - 2) * factorial(n + l));
    bracket -= lead * comb;
  }
  return gdot / s.g * bracket;
}

double berry_connection_numeric(const HydrogenicState& s, double gdot) {
  s.check();
  // R * g dR/dg carries exp(-x) = exp(-2 mF g r / (hbar^2 n)).
  const double rate = 2.0 * s.mF * s.g / (s.units.hbar * s.units.hbar * s.n);
  const double value = laguerre_integral(
      rate, [&](double r) { return polynomial_part(s, s.scaled_radius(r)); },
      [&](double r) { return derivative_polynomial_part(s, s.scaled_radius(r)); }, {});
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "Berry-connection quadrature did not converge (estimate " << value << ")";
    throw NumericalError(msg.str());
  }
  return gdot / s.g * value;
}

double radial_integral(const HydrogenicState& a, const HydrogenicState& b, const std::function<double(double)>& f) {
  check_compatible(a, b);
  const double rate = a.mF * a.g / (a.units.hbar * a.units.hbar) * (1.0 / a.n + 1.0 / b.n);
  return laguerre_integral(
      rate, [&](double r) { return polynomial_part(a, a.scaled_radius(r)); },
      [&](double r) { return polynomial_part(b, b.scaled_radius(r)); }, f);
}

std::optional<double> printed_cd_bracket(const HydrogenicState& s, double r) {
  s.check();
  const double hbar2 = s.units.hbar * s.units.hbar;
  const double gm = s.g * s.mF;
  if (s.n == 1 && s.l == 0) {
    return 1.5 - gm * r / hbar2;
  }
  if (s.n == 2 && s.l == 0) {
    return 3.0 - gm * (gm + hbar2 * r) / (2.0 * hbar2 * hbar2) - 2.0 * hbar2 / (hbar2 - gm * r);
  }
  if (s.n == 2 && s.l == 1) {
    return 3.5 - gm * r / (2.0 * hbar2);
  }
  return std::nullopt;
}

CDProfile cd_potential(const HydrogenicState& s, double gdot, const std::vector<double>& radii) {
  s.check();
  CDProfile out;
  out.radii = radii;
  out.nodes = radial_nodes(s);
  const double mean = berry_connection_numeric(s, 1.0) * s.g; // <B>, zero up to quadrature error
  const double rate = gdot / s.g;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double c;
    try {
      c = gdot == 0.0 ? 0.0 : (radial_g_derivative(s, radii[i]) - mean) * rate;
    } catch (const PoleError&) {
      c = std::numeric_limits<double>::infinity();
      out.poleHits.push_back(i);
    }
    out.coefficient.push_back(c);
    if (const auto p = printed_cd_bracket(s, radii[i])) {
      out.printed.push_back(*p * rate);
    }
  }
  return out;
}

std::vector<CoulombReportRow> coulomb_report(double g, double mF, const UnitSystem& units, int maxN) {
  if (maxN < 1) {
    throw DomainError("report needs maxN >= 1");
  }
  std::vector<CoulombReportRow> rows;
  for (int n = 1; n <= maxN; ++n) {
    for (int l = 0; l < n; ++l) {
      HydrogenicState s{n, l, g, mF, units};
      CoulombReportRow row;
      row.n = n;
      row.l = l;
      row.formulaBerry = berry_connection_formula(s, g);
      row.numericBerry = berry_connection_numeric(s, g);
      const double mean = row.numericBerry;
      row.diagonalCD = radial_integral(s, s, [&](double r) {
        // B(r) R^2 through the pole-free form: (g dR/dg) / R = N(x) / L_k(x).
        const double x = s.scaled_radius(r);
        const double Lk = generalized_laguerre(n - l - 1, 2.0 * l + 1.0, x);
        return derivative_numerator(s, x) / Lk - mean;
      });

      std::vector<std::string> flags;
      if (std::abs(row.formulaBerry - row.numericBerry) > 1e-8) {
        flags.emplace_back("berry_formula_disagrees");
      }
      if (printed_cd_bracket(s, 0.0)) {
        row.hasPrinted = true;
        const auto nodes = radial_nodes(s);
        const double scale = units.hbar * units.hbar * n / (mF * g);
        const double printedPole = units.hbar * units.hbar / (g * mF);
        for (int i = 1; i <= 64; ++i) {
          const double r = 4.0 * scale * n * i / 64.0;
          const auto near = [r, scale](double p) { return std::abs(r - p) < 1e-3 * scale; };
          if (std::any_of(nodes.begin(), nodes.end(), near) || (n == 2 && l == 0 && near(printedPole))) {
            continue;
          }
          row.printedMaxDiff = std::max(row.printedMaxDiff, std::abs(*printed_cd_bracket(s, r) - radial_g_derivative(s, r)));
        }
        if (row.printedMaxDiff > 1e-12) {
          flags.emplace_back("printed_form_differs");
        }
        if (n == 2 && l == 0 && std::abs(printedPole - nodes.front()) > 1e-12 * scale) {
          flags.emplace_back("printed_pole_off_node");
        }
      }
      for (std::size_t i = 0; i < flags.size(); ++i) {
        row.flags += (i ? ";" : "") + flags[i];
      }
      rows.push_back(row);
    }
  }
  return rows;
}

} // namespace cbod
