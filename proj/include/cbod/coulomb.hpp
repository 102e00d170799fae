#pragma once

// Hydrogenic fast sub-system of the trapped charged pair and its g-driven counterdiabatic terms.

#include "cbod/params.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cbod {

struct HydrogenicState {
  int n = 1;
  int l = 0;
  double g = 1.0;
  double mF = 1.0;
  UnitSystem units{};

  /// Throws DomainError unless n >= 1, 0 <= l < n, g > 0, mF > 0.
  void check() const;
  /// x = 2 mF g r / (hbar^2 n).
  double scaled_radius(double r) const;
};

/// L_k^alpha(x) by the three-term recurrence; zero for k < 0.
double generalized_laguerre(int k, double alpha, double x);

/// Normalized R_{n,l}(r), r >= 0.
double radial_wavefunction(const HydrogenicState& s, double r);

/// -mF g^2 / (2 hbar^2 n^2).
double hydrogenic_energy(const HydrogenicState& s);
/// hbar omegaS (u + 3/2) - mF g^2 / (2 hbar^2 n^2).
double slow_total_energy(const HydrogenicState& s, double omegaS, int u);

/// Radii of the n - l - 1 nodes of R_{n,l}, ascending.
std::vector<double> radial_nodes(const HydrogenicState& s);

/// B(r) with dR/dg = (B/g) R. Throws PoleError at a radial node.
double radial_g_derivative(const HydrogenicState& s, double r);
/// g dR/dg, finite everywhere including the nodes.
double g_times_dR_dg(const HydrogenicState& s, double r);

/// The closed-form Berry connection with negative-degree factors dropped.
double berry_connection_formula(const HydrogenicState& s, double gdot);
/// gdot <R|dR/dg> by Gauss-Laguerre quadrature.
double berry_connection_numeric(const HydrogenicState& s, double gdot);

/// int_0^inf R_a R_b f(r) r^2 dr at the combined exponential rate, 200 Gauss-Laguerre nodes.
/// f must be polynomial-like; R_a, R_b must share mF, g and hbar.
double radial_integral(const HydrogenicState& a, const HydrogenicState& b,
                       const std::function<double(double)>& f = {});

/// Literature closed-form brackets for (1,0), (2,0), (2,1); nothing for other states.
std::optional<double> printed_cd_bracket(const HydrogenicState& s, double r);

struct CDProfile {
  std::vector<double> radii;
  std::vector<double> coefficient; // (B(r) - <B>) gdot / g; infinite on a node
  std::vector<double> printed;     // printed bracket times gdot / g, empty when no printed form exists
  std::vector<double> nodes;
  std::vector<std::size_t> poleHits; // indices of radii sitting on a node
};

CDProfile cd_potential(const HydrogenicState& s, double gdot, const std::vector<double>& radii);

struct CoulombReportRow {
  int n = 1;
  int l = 0;
  double formulaBerry = 0.0;   // bracket of the closed form, i.e. per unit gdot/g
  double numericBerry = 0.0;   // same normalization
  double diagonalCD = 0.0;     // <R| B - <B> |R>
  double printedMaxDiff = 0.0; // max |printed - canonical| over sample radii, 0 if no printed form
  bool hasPrinted = false;
  std::string flags;
};

/// One row per (n, l) with n <= maxN.
std::vector<CoulombReportRow> coulomb_report(double g, double mF, const UnitSystem& units, int maxN);

} // namespace cbod
